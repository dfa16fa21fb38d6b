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

#include "cleaning.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace fogdna {

void CleanConfig::validate() const {
    if (!(iqr_multiplier > 0.0)) throw Error(ErrorKind::InvalidConfig, "clean.iqr_multiplier must be > 0");
    if (min_points < 4) throw Error(ErrorKind::InvalidConfig, "clean.min_points must be >= 4");
}

void CleanReport::absorb(const CleanReport& other) {
    missing_removed += other.missing_removed;
    extremes_removed += other.extremes_removed;
    detail.insert(detail.end(), other.detail.begin(), other.detail.end());
}

nlohmann::ordered_json CleanReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["kind"] = "clean_report";
    doc["missing_removed"] = missing_removed;
    doc["extremes_removed"] = extremes_removed;
    auto& arr = doc["detail"] = nlohmann::ordered_json::array();
    for (const auto& d : detail) {
        arr.push_back({{"cell_id", d.cell_id},
                       {"metric_name", d.metric_name},
                       {"missing_removed", d.missing_removed},
                       {"extremes_removed", d.extremes_removed}});
    }
    return doc;
}

CleanReport CleanReport::from_json(const nlohmann::json& doc) {
    CleanReport r;
    r.missing_removed = doc.at("missing_removed").get<std::size_t>();
    r.extremes_removed = doc.at("extremes_removed").get<std::size_t>();
    for (const auto& d : doc.at("detail")) {
        r.detail.push_back({d.at("cell_id").get<std::string>(), d.at("metric_name").get<std::string>(),
                            d.at("missing_removed").get<std::size_t>(),
                            d.at("extremes_removed").get<std::size_t>()});
    }
    return r;
}

double linear_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) return std::nan("");
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CleanResult clean(const MetricSeries& series, const CleanConfig& cfg) {
    cfg.validate();
    CleanResult result;
    result.series = series;
    result.series.points.clear();

    std::vector<double> present;
    present.reserve(series.points.size());
    for (const auto& p : series.points)
        if (p.value) present.push_back(*p.value);

    SeriesCleanDetail detail{series.cell_id, series.metric_name, series.points.size() - present.size(), 0};

    double lower = -INFINITY;
    double upper = INFINITY;
    if (!present.empty()) {
        std::vector<double> sorted = present;
        std::sort(sorted.begin(), sorted.end());
        double q1 = linear_quantile(sorted, 0.25);
        double q3 = linear_quantile(sorted, 0.75);
        double iqr = q3 - q1;
        lower = q1 - cfg.iqr_multiplier * iqr;
        upper = q3 + cfg.iqr_multiplier * iqr;
    }

    for (const auto& p : series.points) {
        if (!p.value) continue;
        if (*p.value < lower || *p.value > upper) {
            ++detail.extremes_removed;
            continue;
        }
        result.series.points.push_back(p);
    }

    if (result.series.points.size() < cfg.min_points) {
        throw Error(ErrorKind::TooFewPoints, series.cell_id + "/" + series.metric_name + ": " +
                                                 std::to_string(result.series.points.size()) +
                                                 " points after cleaning, need " +
                                                 std::to_string(cfg.min_points));
    }

    result.report.missing_removed = detail.missing_removed;
    result.report.extremes_removed = detail.extremes_removed;
    result.report.detail.push_back(std::move(detail));
    return result;
}

SplitResult chrono_split(const MetricSeries& series, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorKind::InvalidConfig, "train_fraction must lie in (0, 1)");
    const std::size_t n = series.points.size();
    // The epsilon absorbs representation error such as 10 * 0.7 = 7.000000000000001.
    auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
    if (n_train == 0 || n_train >= n) {
        throw Error(ErrorKind::TooFewPoints, series.cell_id + "/" + series.metric_name +
                                                 ": split of " + std::to_string(n) +
                                                 " points leaves an empty part");
    }
    SplitResult out{series, series};
    out.train.points.assign(series.points.begin(), series.points.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.points.assign(series.points.begin() + static_cast<std::ptrdiff_t>(n_train), series.points.end());
    return out;
}

}  // namespace fogdna
