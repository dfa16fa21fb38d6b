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

#include <span>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "cleaning.hpp"
#include "fingerprint.hpp"
#include "ingest.hpp"
#include "json.hpp"
#include "postfilter.hpp"
#include "rca.hpp"

namespace fogdna {

// Tunables for every stage. Defaults here are the documented defaults.
struct PipelineSettings {
    CleanConfig clean;
    double train_fraction = 0.7;
    DetectorConfig detector;
    bool use_catalog_bounds = false;
    FilterConfig filter;
    MineConfig mine;
    double z_symptom = 3.0;
    std::size_t rca_k = 3;
    double match_threshold = 0.5;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    // Fields absent from the document keep their current value.
    void apply_json(const nlohmann::json& doc);
};

struct PreparedData {
    std::vector<MetricSeries> train;  // cleaned
    std::vector<MetricSeries> test;   // grid kept, extremes kept
    CleanReport report;
};

// Chronological split of every series, then cleaning of the training part.
PreparedData prepare_series(std::span<const MetricSeries> series, const PipelineSettings& settings);

// Scores and filters every KQI series; events ordered by (cell, metric, start).
std::vector<AnomalyEvent> detect_events(const BaselineModel& model, std::span<const MetricSeries> test,
                                        const PipelineSettings& settings);

std::vector<DiagnosedEvent> diagnose_events(const FingerprintDb& db, std::span<const AnomalyEvent> events,
                                            const SymptomExtractor& extractor, const PipelineSettings& settings,
                                            std::vector<std::string>* warnings = nullptr);

}  // namespace fogdna
