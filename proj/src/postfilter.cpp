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

#include "postfilter.hpp"

#include <algorithm>

#include "common.hpp"

namespace fogdna {

void FilterConfig::validate() const {
    if (persistence_m < 1 || persistence_m > persistence_n)
        throw Error(ErrorKind::InvalidConfig, "filter requires 1 <= persistence_m <= persistence_n");
}

std::vector<bool> persistence_filter(const std::vector<bool>& flags, std::size_t m, std::size_t n) {
    const std::size_t len = flags.size();
    std::vector<bool> survives(len, false);
    // prefix[i] = flags in [0, i)
    std::vector<std::size_t> prefix(len + 1, 0);
    for (std::size_t i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + (flags[i] ? 1 : 0);

    // Runs that stick out past either end count the missing slots as unflagged.
    for (std::size_t end = 0; end < len + n - 1; ++end) {
        std::size_t hi = std::min(end + 1, len);
        std::size_t lo = end + 1 >= n ? end + 1 - n : 0;
        if (lo >= len) break;
        if (prefix[hi] - prefix[lo] < m) continue;
        for (std::size_t i = lo; i < hi; ++i)
            if (flags[i]) survives[i] = true;
    }
    return survives;
}

std::vector<AnomalyEvent> apply_filters(const ScoredSeries& scored, const FilterConfig& cfg) {
    cfg.validate();
    std::vector<AnomalyEvent> events;
    const auto& w = scored.windows;
    if (w.empty()) return events;

    // Grid positions, robust to gaps in the scored windows.
    const std::int64_t first = w.front().window_start;
    const std::int64_t wl = scored.window_len > 0 ? scored.window_len : 1;
    const auto grid_len = static_cast<std::size_t>((w.back().window_start - first) / wl + 1);
    std::vector<bool> flags(grid_len, false);
    std::vector<const ScoredWindow*> by_pos(grid_len, nullptr);
    for (const auto& sw : w) {
        auto pos = static_cast<std::size_t>((sw.window_start - first) / wl);
        by_pos[pos] = &sw;
        flags[pos] = sw.flagged;
    }

    auto survives = persistence_filter(flags, cfg.persistence_m, cfg.persistence_n);

    std::size_t i = 0;
    while (i < grid_len) {
        if (!survives[i]) {
            ++i;
            continue;
        }
        std::size_t start = i;
        std::size_t end = i;
        for (std::size_t j = i + 1; j < grid_len && j - end - 1 <= cfg.merge_gap; ++j)
            if (survives[j]) end = j;
        AnomalyEvent ev;
        ev.cell_id = scored.cell_id;
        ev.metric_name = scored.metric_name;
        ev.start_window = first + static_cast<std::int64_t>(start) * wl;
        ev.end_window = first + static_cast<std::int64_t>(end) * wl;
        bool have_peak = false;
        for (std::size_t k = start; k <= end; ++k) {
            if (!survives[k]) continue;
            const auto* sw = by_pos[k];
            if (!have_peak || sw->score.score > ev.peak_score) {
                have_peak = true;
                ev.peak_score = sw->score.score;
                ev.peak_window = sw->window_start;
                ev.direction = sw->score.direction;
            }
        }
        if (ev.peak_score >= cfg.min_peak_score) events.push_back(std::move(ev));
        i = end + 1;
    }
    return events;
}

nlohmann::ordered_json event_to_json(const AnomalyEvent& e) {
    return {{"cell_id", e.cell_id},
            {"metric_name", e.metric_name},
            {"start_window", e.start_window},
            {"end_window", e.end_window},
            {"peak_score", e.peak_score},
            {"peak_window", e.peak_window},
            {"direction", to_string(e.direction)}};
}

AnomalyEvent event_from_json(const nlohmann::json& doc) {
    AnomalyEvent e;
    e.cell_id = doc.at("cell_id").get<std::string>();
    e.metric_name = doc.at("metric_name").get<std::string>();
    e.start_window = doc.at("start_window").get<std::int64_t>();
    e.end_window = doc.at("end_window").get<std::int64_t>();
    e.peak_score = doc.at("peak_score").get<double>();
    e.peak_window = doc.at("peak_window").get<std::int64_t>();
    e.direction = parse_direction(doc.at("direction").get<std::string>());
    return e;
}

std::string serialize_events(std::span<const AnomalyEvent> events) {
    std::string out;
    for (const auto& e : events) {
        out += event_to_json(e).dump();
        out += '\n';
    }
    return out;
}

std::vector<AnomalyEvent> parse_events(std::string_view jsonl) {
    std::vector<AnomalyEvent> out;
    std::size_t line_no = 0;
    for (auto line : split_fields(jsonl, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded())
            throw Error(ErrorKind::MalformedRow, "event line " + std::to_string(line_no) + " is not JSON",
                        {line_no});
        try {
            out.push_back(event_from_json(doc.contains("event") ? doc.at("event") : doc));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorKind::MalformedRow, "event line " + std::to_string(line_no) + ": " + ex.what(),
                        {line_no});
        }
    }
    return out;
}

}  // namespace fogdna
