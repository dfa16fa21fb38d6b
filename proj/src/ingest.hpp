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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fogdna {

enum class MetricKind { Kqi, Kpi };
enum class Polarity { HigherIsWorse, LowerIsWorse };

std::string to_string(MetricKind kind);
std::string to_string(Polarity polarity);
MetricKind parse_metric_kind(std::string_view text);
Polarity parse_polarity(std::string_view text);

struct CdrRecord {
    std::string cell_id;
    std::int64_t start_time = 0;
    double duration = 0.0;
    bool dropped = false;
    // Irreversible subscriber hashes; raw numbers are never accepted.
    std::string source_hash;
    std::string dest_hash;

    bool operator==(const CdrRecord&) const = default;
};

struct MetricPoint {
    std::int64_t window_start = 0;
    std::optional<double> value;  // nullopt is MISSING

    bool operator==(const MetricPoint&) const = default;
};

struct MetricSeries {
    std::string cell_id;
    std::string metric_name;
    MetricKind kind = MetricKind::Kqi;
    Polarity polarity = Polarity::HigherIsWorse;
    std::int64_t window_len = 0;
    std::vector<MetricPoint> points;

    std::size_t present_count() const;
    bool operator==(const MetricSeries&) const = default;
};

struct CellWindowKey {
    std::string cell_id;
    std::int64_t window_start = 0;

    auto operator<=>(const CellWindowKey&) const = default;
    bool operator==(const CellWindowKey&) const = default;
};

struct MetricInfo {
    MetricKind kind = MetricKind::Kqi;
    Polarity polarity = Polarity::HigherIsWorse;
    std::int64_t window_len = 0;
    // Declared value range; fixes histogram bounds for distributed training.
    std::optional<std::pair<double, double>> range;

    bool operator==(const MetricInfo&) const = default;
};

using MetricCatalog = std::map<std::string, MetricInfo>;

nlohmann::ordered_json catalog_to_json(const MetricCatalog& catalog);
MetricCatalog catalog_from_json(const nlohmann::json& doc);
MetricCatalog load_catalog(const std::filesystem::path& path);

inline constexpr std::string_view kCdrHeader =
    "cell_id,start_time,duration,dropped,source_hash,dest_hash";
inline constexpr std::string_view kMetricHeader = "cell_id,metric_name,window_start,value";

std::vector<CdrRecord> parse_cdr(std::string_view text);
std::vector<CdrRecord> load_cdr(const std::filesystem::path& path);
std::string serialize_cdr(std::span<const CdrRecord> records);

std::vector<MetricSeries> parse_metric_csv(std::string_view text, MetricKind kind,
                                           const MetricCatalog& catalog);
std::vector<MetricSeries> load_metric_csv(const std::filesystem::path& path, MetricKind kind,
                                           const MetricCatalog& catalog);
// One row per point, MISSING as an empty value field.
std::string serialize_metric_csv(std::span<const MetricSeries> series);

inline constexpr std::string_view kCallAttempts = "call_attempts";
inline constexpr std::string_view kDropRate = "drop_rate";
inline constexpr std::string_view kMeanDuration = "mean_duration";

// Cell-level KQIs derived from CDRs. A call belongs to the window holding its
// start_time. Each cell's grid spans its own first to last occupied window.
std::vector<MetricSeries> aggregate_cdr(std::span<const CdrRecord> records,
                                        std::int64_t window_len);

}  // namespace fogdna
