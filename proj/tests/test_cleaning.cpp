// Copyright 2026 The fogdna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>

#include "cleaning.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace fogdna;
using fogdna::testing::error_kind;
using fogdna::testing::make_series;

namespace {

std::vector<std::optional<double>> constant(std::size_t n, double v) { return std::vector<std::optional<double>>(n, v); }

// Type-7 quantile written out longhand: position (n-1)q between order statistics.
double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = (v.size() - 1) * q;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    return v[i] * (1.0 - (pos - i)) + v[i + 1] * (pos - i);
}

}  // namespace

TEST_CASE("constant series is untouched") {
    auto s = make_series("c1", "rtt", constant(30, 5.0));
    auto r = clean(s, {});
    CHECK(r.series == s);
    CHECK(r.report.missing_removed == 0);
    CHECK(r.report.extremes_removed == 0);
}

TEST_CASE("a gross outlier among constants is removed") {
    auto v = constant(29, 5.0);
    v.insert(v.begin() + 11, 1e9);
    std::vector<double> raw;
    for (auto x : v) raw.push_back(*x);
    double q1 = oracle_quantile(raw, 0.25), q3 = oracle_quantile(raw, 0.75);
    CHECK(q1 == 5.0);
    CHECK(q3 == 5.0);

    auto r = clean(make_series("c1", "rtt", v), {6.0, 24});
    CHECK(r.report.extremes_removed == 1);
    CHECK(r.series.points.size() == 29);
    for (const auto& p : r.series.points) CHECK(*p.value == 5.0);
}

TEST_CASE("missing values are counted") {
    auto v = constant(30, 5.0);
    for (int i = 0; i < 30; i += 3) v[i] = std::nullopt;
    auto s = make_series("c1", "rtt", v);
    auto r = clean(s, {6.0, 20});
    CHECK(r.report.missing_removed == 10);
    CHECK(r.series.points.size() == 20);
    // twenty survivors fall short of the default floor
    CHECK(error_kind([&] { clean(s, {}); }) == ErrorKind::TooFewPoints);
}

TEST_CASE("config validation") {
    auto s = make_series("c1", "rtt", constant(30, 5.0));
    CHECK(error_kind([&] { clean(s, {0.0, 24}); }) == ErrorKind::InvalidConfig);
    CHECK(error_kind([&] { clean(s, {6.0, 3}); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("linear_quantile agrees with the longhand oracle") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + rng() % 50);
        for (auto& x : v) x = nd(rng);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0})
            CHECK(linear_quantile(sorted, q) == doctest::Approx(oracle_quantile(v, q)).epsilon(1e-12));
    }
}

TEST_CASE("cleaning reconciles counts, preserves order and runs a single pass") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd(10.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::optional<double>> v;
        const std::size_t n = 30 + rng() % 60;
        for (std::size_t i = 0; i < n; ++i) {
            auto r = rng() % 20;
            if (r == 0) v.push_back(std::nullopt);
            else if (r == 1) v.push_back(10.0 + std::pow(10.0, 1.0 + rng() % 6));
            else v.push_back(nd(rng));
        }
        auto s = make_series("c1", "rtt", v);
        CleanResult out;
        try {
            out = clean(s, {6.0, 4});
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::TooFewPoints);
            continue;
        }
        CHECK(out.report.missing_removed + out.report.extremes_removed + out.series.points.size() == n);
        for (std::size_t i = 1; i < out.series.points.size(); ++i)
            CHECK(out.series.points[i - 1].window_start < out.series.points[i].window_start);

        CHECK(clean(out.series, {6.0, 4}).report.missing_removed == 0);
        CHECK(clean(s, {6.0, 4}).series == out.series);
    }
}

TEST_CASE("fences are computed once; a second pass may remove more") {
    auto s = make_series("c1", "rtt", {3.0, 0.0, 50.0, 2.0, 1000.0, 3.0, 0.0, 5.0, 10.0});
    auto first = clean(s, {6.0, 4});
    CHECK(first.report.extremes_removed == 1);
    for (const auto& p : first.series.points) CHECK(*p.value != 1000.0);
    auto second = clean(first.series, {6.0, 4});
    CHECK(second.report.extremes_removed == 1);
    for (const auto& p : second.series.points) CHECK(*p.value != 50.0);
}

TEST_CASE("chrono_split boundaries") {
    auto ten = make_series("c1", "rtt", constant(10, 1.0));
    auto s = chrono_split(ten, 0.7);
    CHECK(s.train.points.size() == 7);
    CHECK(s.test.points.size() == 3);
    CHECK(s.test.points[0].window_start == 7 * 300);
    CHECK(error_kind([&] { chrono_split(ten, 0.95); }) == ErrorKind::TooFewPoints);
    auto two = chrono_split(make_series("c1", "rtt", constant(2, 1.0)), 0.5);
    CHECK(two.train.points.size() == 1);
    CHECK(two.test.points.size() == 1);
    CHECK(error_kind([&] { chrono_split(ten, 0.0); }) == ErrorKind::InvalidConfig);
    CHECK(error_kind([&] { chrono_split(ten, 1.0); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("clean report JSON round-trip") {
    CleanReport r{3, 4, {{"c1", "rtt", 1, 2}, {"c2", "loss", 2, 2}}};
    auto back = CleanReport::from_json(nlohmann::json::parse(r.to_json().dump()));
    CHECK(back.missing_removed == 3);
    CHECK(back.extremes_removed == 4);
    REQUIRE(back.detail.size() == 2);
    CHECK(back.detail[1].metric_name == "loss");
}
