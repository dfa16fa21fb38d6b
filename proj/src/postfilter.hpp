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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "json.hpp"

namespace fogdna {

struct FilterConfig {
    std::size_t persistence_m = 2;
    std::size_t persistence_n = 3;
    std::size_t merge_gap = 2;
    double min_peak_score = 6.0;

    void validate() const;
};

struct AnomalyEvent {
    std::string cell_id;
    std::string metric_name;
    std::int64_t start_window = 0;
    std::int64_t end_window = 0;
    double peak_score = 0.0;
    std::int64_t peak_window = 0;
    Direction direction = Direction::None;

    bool operator==(const AnomalyEvent&) const = default;
};

// A flagged window survives when some run of n consecutive windows that
// contains it holds at least m flags.
std::vector<bool> persistence_filter(const std::vector<bool>& flags, std::size_t m, std::size_t n);

// Persistence, then merge of survivors at most merge_gap windows apart, then
// the peak-score floor. Events come out in chronological order.
std::vector<AnomalyEvent> apply_filters(const ScoredSeries& scored, const FilterConfig& cfg);

nlohmann::ordered_json event_to_json(const AnomalyEvent& e);
AnomalyEvent event_from_json(const nlohmann::json& doc);
std::string serialize_events(std::span<const AnomalyEvent> events);
std::vector<AnomalyEvent> parse_events(std::string_view jsonl);

}  // namespace fogdna
