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
#include <random>
#include <tuple>

#include "doctest.h"
#include "rca.hpp"
#include "support.hpp"

using namespace fogdna;
using fogdna::testing::error_kind;
using fogdna::testing::random_item_set;

namespace {

const SymptomItem kRtt{"rtt", SymptomState::High};
const SymptomItem kLoss{"loss", SymptomState::High};
const SymptomItem kSinr{"sinr", SymptomState::Low};

Fingerprint rule(std::vector<SymptomItem> ante, std::string q, double conf, std::uint64_t sc,
                 std::optional<std::string> label = std::nullopt) {
    canonicalize(ante);
    auto ac = static_cast<std::uint64_t>(static_cast<double>(sc) / conf + 0.5);
    return {std::move(ante), std::move(q), sc / 100.0, sc, ac, conf, 2.0, std::move(label)};
}

FingerprintDb db_of(std::vector<Fingerprint> rules) {
    FingerprintDb db;
    db.rules = std::move(rules);
    db.transaction_total = 100;
    return db;
}

}  // namespace

TEST_CASE("jaccard examples") {
    std::vector<SymptomItem> ab{kLoss, kRtt}, bc{kRtt, kSinr}, c{kSinr}, none;
    CHECK(jaccard_distance(ab, ab) == 0.0);
    CHECK(jaccard_distance(ab, bc) == doctest::Approx(1.0 - 1.0 / 3.0));
    CHECK(jaccard_distance(ab, c) == 1.0);
    CHECK(jaccard_distance(none, none) == 0.0);
    CHECK(jaccard_distance(none, c) == 1.0);
}

TEST_CASE("jaccard is a metric") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 5000; ++i) {
        auto a = random_item_set(rng), b = random_item_set(rng), c = random_item_set(rng);
        double ab = jaccard_distance(a, b), bc = jaccard_distance(b, c), ac = jaccard_distance(a, c);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == jaccard_distance(b, a));
        CHECK((ab == 0.0) == (a == b));
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("exact signature match") {
    auto db = db_of({rule({kRtt}, "Q", 1.0, 5, "congestion")});
    auto d = diagnose(db, {{kRtt}, "Q", std::nullopt}, 3, 0.5);
    REQUIRE(d.ranked.size() == 1);
    CHECK(d.ranked[0].cause_label == "congestion");
    CHECK(d.ranked[0].distance == 0.0);
    CHECK(d.matched);

    auto miss = diagnose(db, {{kLoss}, "Q", std::nullopt}, 3, 0.5);
    REQUIRE(miss.ranked.size() == 1);
    CHECK(miss.ranked[0].distance == 1.0);
    CHECK_FALSE(miss.matched);
    CHECK(diagnose(db, {{kLoss}, "Q", std::nullopt}, 3, 1.0).matched);

    auto other = diagnose(db, {{kRtt}, "R", std::nullopt}, 3, 0.5);
    CHECK(other.ranked.empty());
    CHECK_FALSE(other.matched);
}

TEST_CASE("unlabelled rules rank as UNLABELED") {
    auto db = db_of({rule({kRtt}, "Q", 1.0, 5)});
    CHECK(diagnose(db, {{kRtt}, "Q", std::nullopt}, 1, 0.5).ranked[0].cause_label == kUnlabeled);
}

TEST_CASE("tie-breaks: distance, confidence, support, antecedent") {
    auto db = db_of({rule({kRtt, kSinr}, "Q", 0.9, 4, "x"), rule({kRtt}, "Q", 0.9, 6, "y"),
                     rule({kLoss}, "Q", 0.9, 6, "z"), rule({kLoss, kSinr}, "Q", 0.95, 2, "w")});
    auto d = diagnose(db, {{kLoss, kRtt}, "Q", std::nullopt}, 10, 0.5);
    std::vector<std::string> order;
    for (const auto& r : d.ranked) order.push_back(r.cause_label);
    // {loss,sinr} and {rtt,sinr} sit at 2/3; singles at 1/2
    CHECK(order == std::vector<std::string>{"z", "y", "w", "x"});
}

TEST_CASE("diagnose equals a brute-force full sort, any rule order") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Fingerprint> rules;
        std::set<std::pair<std::vector<SymptomItem>, std::string>> seen;
        for (int i = 0; i < 20; ++i) {
            auto a = random_item_set(rng);
            std::string q = rng() % 3 ? "Q" : "R";
            if (a.empty() || !seen.insert({a, q}).second) continue;
            double conf = std::round(u(rng) * 4.0) / 4.0;
            if (conf == 0.0) conf = 0.25;
            rules.push_back(rule(a, q, conf, 1 + rng() % 4, "L" + std::to_string(i)));
        }
        SymptomSet s{random_item_set(rng), "Q", std::nullopt};
        const std::size_t k = 1 + rng() % 5;
        const double thr = u(rng);

        std::vector<std::tuple<double, double, std::int64_t, std::vector<SymptomItem>, std::string>> all;
        for (const auto& r : rules)
            if (r.consequent == "Q")
                all.emplace_back(jaccard_distance(r.antecedent, s.items), -r.confidence,
                                 -static_cast<std::int64_t>(r.support_count), r.antecedent, *r.cause_label);
        std::sort(all.begin(), all.end());
        if (all.size() > k) all.resize(k);

        auto d = diagnose(db_of(rules), s, k, thr);
        REQUIRE(d.ranked.size() == all.size());
        for (std::size_t i = 0; i < all.size(); ++i) CHECK(d.ranked[i].cause_label == std::get<4>(all[i]));
        CHECK(d.matched == (!all.empty() && std::get<0>(all[0]) <= thr));

        std::shuffle(rules.begin(), rules.end(), rng);
        auto again = diagnose(db_of(rules), s, k, thr);
        for (std::size_t i = 0; i < d.ranked.size(); ++i)
            CHECK(again.ranked[i].cause_label == d.ranked[i].cause_label);
    }
}

TEST_CASE("argument validation") {
    auto db = db_of({});
    CHECK(error_kind([&] { diagnose(db, {}, 0, 0.5); }) == ErrorKind::InvalidConfig);
    CHECK(error_kind([&] { diagnose(db, {}, 1, 1.5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("diagnosis JSON Lines round-trip") {
    auto db = db_of({rule({kRtt}, "Q", 1.0, 5, "congestion"), rule({kLoss, kRtt}, "Q", 0.8, 4)});
    std::vector<DiagnosedEvent> rows;
    AnomalyEvent ev{"c1", "Q", 0, 600, 9.5, 300, Direction::Up};
    rows.push_back({ev, {kRtt}, diagnose(db, {{kRtt}, "Q", ev}, 3, 0.5)});
    rows.push_back({ev, {}, diagnose(db, {{}, "R", ev}, 3, 0.5)});
    auto text = serialize_diagnoses(rows);
    auto back = parse_diagnoses(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].event == ev);
    CHECK(back[0].diagnosis.ranked.size() == 2);
    CHECK(back[0].diagnosis.ranked[1].fingerprint == rows[0].diagnosis.ranked[1].fingerprint);
    CHECK(serialize_diagnoses(back) == text);
}
