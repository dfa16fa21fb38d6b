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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ingest.hpp"
#include "json.hpp"

namespace fogdna {

struct CleanConfig {
    double iqr_multiplier = 6.0;
    std::size_t min_points = 24;

    void validate() const;
};

struct SeriesCleanDetail {
    std::string cell_id;
    std::string metric_name;
    std::size_t missing_removed = 0;
    std::size_t extremes_removed = 0;
};

struct CleanReport {
    std::size_t missing_removed = 0;
    std::size_t extremes_removed = 0;
    std::vector<SeriesCleanDetail> detail;

    void absorb(const CleanReport& other);
    nlohmann::ordered_json to_json() const;
    static CleanReport from_json(const nlohmann::json& doc);
};

struct CleanResult {
    MetricSeries series;
    CleanReport report;
};

// Drops MISSING points, then drops values outside the Tukey fences
// [Q1 - k*IQR, Q3 + k*IQR] computed once over the present values.
CleanResult clean(const MetricSeries& series, const CleanConfig& cfg);

struct SplitResult {
    MetricSeries train;
    MetricSeries test;
};

// First ceil(n * train_fraction) points go to train, the rest to test.
SplitResult chrono_split(const MetricSeries& series, double train_fraction);

// Linear-interpolation quantile (R type 7) over an ascending-sorted sample.
double linear_quantile(std::span<const double> sorted, double q);

}  // namespace fogdna
