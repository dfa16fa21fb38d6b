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

#include "pipeline.hpp"

#include <algorithm>
#include <tuple>

#include "common.hpp"

namespace fogdna {

void PipelineSettings::validate() const {
    clean.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorKind::InvalidConfig, "split.train_fraction must lie in (0, 1)");
    detector.validate();
    filter.validate();
    mine.validate();
    if (!(z_symptom > 0.0)) throw Error(ErrorKind::InvalidConfig, "mine.z_symptom must be > 0");
    if (rca_k < 1) throw Error(ErrorKind::InvalidConfig, "rca.k must be >= 1");
    if (!(match_threshold >= 0.0 && match_threshold <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "rca.match_threshold must lie in [0, 1]");
}

nlohmann::ordered_json PipelineSettings::to_json() const {
    nlohmann::ordered_json doc;
    doc["clean"] = {{"iqr_multiplier", clean.iqr_multiplier}, {"min_points", clean.min_points}};
    doc["split"] = {{"train_fraction", train_fraction}};
    doc["detector"] = {{"bin_count", detector.bin_count},
                       {"tau", detector.tau},
                       {"min_samples", detector.min_samples},
                       {"use_catalog_bounds", use_catalog_bounds}};
    doc["filter"] = {{"persistence_m", filter.persistence_m},
                     {"persistence_n", filter.persistence_n},
                     {"merge_gap", filter.merge_gap},
                     {"min_peak_score", filter.min_peak_score}};
    doc["mine"] = {{"s_min_count", mine.s_min_count},
                   {"s_max_fraction", mine.s_max_fraction},
                   {"c_min", mine.c_min},
                   {"lift_min", mine.lift_min},
                   {"max_antecedent", mine.max_antecedent},
                   {"z_symptom", z_symptom}};
    doc["rca"] = {{"k", rca_k}, {"match_threshold", match_threshold}};
    return doc;
}

namespace {

template <typename T>
void pick(const nlohmann::json& doc, const char* section, const char* field, T& out) {
    if (!doc.contains(section)) return;
    const auto& s = doc.at(section);
    if (!s.is_object() || !s.contains(field)) return;
    try {
        out = s.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::InvalidConfig, std::string(section) + "." + field + " has the wrong type");
    }
}

}  // namespace

void PipelineSettings::apply_json(const nlohmann::json& doc) {
    pick(doc, "clean", "iqr_multiplier", clean.iqr_multiplier);
    pick(doc, "clean", "min_points", clean.min_points);
    pick(doc, "split", "train_fraction", train_fraction);
    pick(doc, "detector", "bin_count", detector.bin_count);
    pick(doc, "detector", "tau", detector.tau);
    pick(doc, "detector", "min_samples", detector.min_samples);
    pick(doc, "detector", "use_catalog_bounds", use_catalog_bounds);
    pick(doc, "filter", "persistence_m", filter.persistence_m);
    pick(doc, "filter", "persistence_n", filter.persistence_n);
    pick(doc, "filter", "merge_gap", filter.merge_gap);
    pick(doc, "filter", "min_peak_score", filter.min_peak_score);
    pick(doc, "mine", "s_min_count", mine.s_min_count);
    pick(doc, "mine", "s_max_fraction", mine.s_max_fraction);
    pick(doc, "mine", "c_min", mine.c_min);
    pick(doc, "mine", "lift_min", mine.lift_min);
    pick(doc, "mine", "max_antecedent", mine.max_antecedent);
    pick(doc, "mine", "z_symptom", z_symptom);
    pick(doc, "rca", "k", rca_k);
    pick(doc, "rca", "match_threshold", match_threshold);
}

PreparedData prepare_series(std::span<const MetricSeries> series, const PipelineSettings& settings) {
    PreparedData out;
    out.train.reserve(series.size());
    out.test.reserve(series.size());
    for (const auto& s : series) {
        auto split = chrono_split(s, settings.train_fraction);
        auto cleaned = clean(split.train, settings.clean);
        out.report.absorb(cleaned.report);
        out.train.push_back(std::move(cleaned.series));
        out.test.push_back(std::move(split.test));
    }
    return out;
}

std::vector<AnomalyEvent> detect_events(const BaselineModel& model, std::span<const MetricSeries> test,
                                        const PipelineSettings& settings) {
    std::vector<AnomalyEvent> events;
    for (const auto& s : test) {
        if (s.kind != MetricKind::Kqi) continue;
        auto scored = score_series(model, s, settings.detector.tau);
        auto found = apply_filters(scored, settings.filter);
        events.insert(events.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    std::stable_sort(events.begin(), events.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
        return std::tie(a.cell_id, a.metric_name, a.start_window) < std::tie(b.cell_id, b.metric_name, b.start_window);
    });
    return events;
}

std::vector<DiagnosedEvent> diagnose_events(const FingerprintDb& db, std::span<const AnomalyEvent> events,
                                            const SymptomExtractor& extractor, const PipelineSettings& settings,
                                            std::vector<std::string>* warnings) {
    std::vector<DiagnosedEvent> out;
    out.reserve(events.size());
    for (const auto& ev : events) {
        SymptomSet s;
        s.consequent = ev.metric_name;
        s.event = ev;
        if (auto items = extractor.extract(ev.cell_id, ev.peak_window, warnings)) {
            s.items = std::move(*items);
        } else if (warnings) {
            warnings->push_back("MissingKpiData: " + ev.cell_id + " @ " + std::to_string(ev.peak_window));
        }
        auto d = diagnose(db, s, settings.rca_k, settings.match_threshold);
        out.push_back({ev, std::move(s.items), std::move(d)});
    }
    return out;
}

}  // namespace fogdna
