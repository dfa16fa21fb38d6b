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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ingest.hpp"
#include "json.hpp"

namespace fogdna {

inline constexpr double kMadConsistency = 1.4826;
inline constexpr double kScoreEpsilon = 1e-9;
inline constexpr int kBaselineSchemaVersion = 1;

struct MedianMad {
    double median = 0.0;
    double mad = 0.0;
};

// Fixed-range equal-width histogram. Counts are additive, so sketches with
// identical bounds merge exactly.
class HistogramSketch {
public:
    HistogramSketch() = default;
    HistogramSketch(double lo, double hi, std::size_t bin_count);

    // Extents are (bin, min, max) for occupied bins; a bin without one is
    // taken to span its full width.
    struct BinExtent {
        std::size_t bin = 0;
        double min = 0.0;
        double max = 0.0;
    };
    static HistogramSketch from_parts(double lo, double hi, std::vector<std::uint64_t> counts,
                                      std::uint64_t underflow, std::uint64_t overflow,
                                      const std::vector<BinExtent>& extents = {});

    void insert(double value);
    bool compatible(const HistogramSketch& other) const;
    void merge(const HistogramSketch& other);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t bin_count() const { return counts_.size(); }
    double bin_width() const { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
    double bin_midpoint(std::size_t bin) const;
    // Bin midpoint pulled inside the smallest and largest value the bin has
    // seen. Exact for a bin holding a single distinct value.
    double bin_value(std::size_t bin) const;
    std::vector<BinExtent> extents() const;
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t underflow() const { return underflow_; }
    std::uint64_t overflow() const { return overflow_; }
    std::uint64_t total() const;

    // Median and MAD of the sample with every value moved to bin_value of its
    // bin (underflow at lo, overflow at hi). Each estimate is within one bin
    // width of the raw-value statistic when no value falls outside [lo, hi].
    MedianMad median_mad() const;

    bool operator==(const HistogramSketch&) const = default;

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    std::vector<std::uint64_t> counts_;
    std::vector<double> bin_min_;  // +inf while the bin is empty
    std::vector<double> bin_max_;  // -inf while the bin is empty
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
};

struct DetectorConfig {
    std::size_t bin_count = 128;
    double tau = 5.0;
    std::uint64_t min_samples = 20;

    void validate() const;
    bool operator==(const DetectorConfig&) const = default;
};

struct BaselineKey {
    std::string cell_id;
    std::string metric_name;
    int hour = 0;

    auto operator<=>(const BaselineKey&) const = default;
    bool operator==(const BaselineKey&) const = default;
};

struct BaselineEntry {
    HistogramSketch sketch;
    std::uint64_t sample_count = 0;

    bool operator==(const BaselineEntry&) const = default;
};

struct BaselineModel {
    DetectorConfig config;
    std::map<BaselineKey, BaselineEntry> entries;
    std::map<std::string, Polarity> polarities;

    bool sufficient(const BaselineEntry& entry) const { return entry.sample_count >= config.min_samples; }
    bool operator==(const BaselineModel&) const = default;
};

enum class Direction { Up, Down, None };
std::string to_string(Direction d);
Direction parse_direction(std::string_view text);

struct AnomalyScore {
    double score = 0.0;
    Direction direction = Direction::None;
    bool degrading = false;
    bool sufficient_data = false;
};

struct ScoredWindow {
    std::int64_t window_start = 0;
    AnomalyScore score;
    bool flagged = false;
};

struct ScoredSeries {
    std::string cell_id;
    std::string metric_name;
    Polarity polarity = Polarity::HigherIsWorse;
    std::int64_t window_len = 0;
    std::vector<ScoredWindow> windows;
};

// metric -> (lo, hi). Metrics listed here get these sketch bounds instead of
// bounds derived from their training values.
using BoundsTable = std::map<std::string, std::pair<double, double>>;

BoundsTable bounds_from_catalog(const MetricCatalog& catalog);

int hour_bucket(std::int64_t window_start);

BaselineModel fit_baseline(std::span<const MetricSeries> train, const DetectorConfig& cfg,
                           const BoundsTable& fixed_bounds = {});

AnomalyScore robust_score(const BaselineModel& model, const BaselineKey& key, double value);

std::vector<ScoredWindow> score_windows(const BaselineModel& model, const MetricSeries& test, double tau);
ScoredSeries score_series(const BaselineModel& model, const MetricSeries& test, double tau);

BaselineModel merge_baselines(std::span<const BaselineModel> models);

// Reference scorer over raw values.
MedianMad exact_median_mad(std::span<const double> values);
double robust_z(double value, const MedianMad& mm);
AnomalyScore make_score(double value, const MedianMad& mm, Polarity polarity, bool sufficient);
AnomalyScore exact_robust_score(std::span<const double> data, double value, Polarity polarity);

nlohmann::ordered_json model_to_json(const BaselineModel& model);
BaselineModel model_from_json(const nlohmann::json& doc);
std::string serialize_model(const BaselineModel& model);
void save_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_model(const std::filesystem::path& path);

// Restricts a model to the given cells (used for shipping slices to edges).
BaselineModel restrict_to_cells(const BaselineModel& model, const std::vector<std::string>& cells);

}  // namespace fogdna
