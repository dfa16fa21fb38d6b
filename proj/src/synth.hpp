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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fingerprint.hpp"
#include "ingest.hpp"
#include "json.hpp"
#include "postfilter.hpp"
#include "rca.hpp"

namespace fogdna {

// Portable generator: std::mt19937_64 (fully specified by the standard) with
// hand-written transforms, since std:: distributions differ between
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t below(std::uint64_t n);
    double normal();
    double exponential(double mean);
    std::uint64_t poisson(double lambda);

private:
    std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

struct MetricGenerator {
    std::string name;
    MetricKind kind = MetricKind::Kqi;
    Polarity polarity = Polarity::HigherIsWorse;
    std::array<double, 24> hourly_mean{};
    double sigma = 1.0;
    std::pair<double, double> range{0.0, 1.0};
};

struct CausePattern {
    std::string cause_label;
    std::vector<SymptomItem> symptoms;
    std::string kqi;
};

struct PlannedAnomaly {
    std::string cell_id;
    std::string kqi;
    std::int64_t start = 0;  // epoch seconds, on the window grid
    std::int64_t duration_windows = 1;
    double magnitude = 8.0;  // in units of 1.4826 * MAD of the baseline noise
    std::optional<std::string> cause;
};

struct ScenarioSpec {
    std::size_t n_cells = 50;
    std::int64_t days = 14;
    std::int64_t window_len = 300;
    std::int64_t start_time = 1704067200;
    double train_fraction = 0.7;
    std::uint64_t seed = 7;
    double missing_rate = 0.001;
    double corruption_rate = 0.0002;
    double symptom_magnitude = 8.0;
    double cdr_calls_per_window = 6.0;
    double cdr_drop_probability = 0.2;
    double cdr_mean_duration = 90.0;
    std::vector<MetricGenerator> metrics;
    std::vector<CausePattern> causes;
    std::vector<PlannedAnomaly> anomalies;
    // Recommended pipeline overrides for this scenario's scale.
    nlohmann::json pipeline = nlohmann::json::object();
    // Fixed serialized record sizes for the deployment simulator.
    nlohmann::json record_sizes = nlohmann::json::object();

    void validate() const;
    std::vector<std::string> cell_ids() const;
    std::size_t window_count() const;
    std::int64_t test_start() const;
    std::int64_t end_time() const;
    MetricCatalog catalog() const;
};

ScenarioSpec default_scenario(std::size_t n_anomalies = 12);

nlohmann::ordered_json spec_to_json(const ScenarioSpec& spec);
ScenarioSpec spec_from_json(const nlohmann::json& doc);
ScenarioSpec load_spec(const std::filesystem::path& path);

struct PlantedEvent {
    std::string cell_id;
    std::string kqi;
    std::int64_t start_window = 0;
    std::int64_t end_window = 0;
    std::string cause_label;
};

struct PlantedRule {
    std::vector<SymptomItem> pattern;
    std::string kqi;
    std::string cause_label;
};

struct GroundTruth {
    std::int64_t test_start = 0;
    std::vector<PlantedEvent> events;
    std::vector<PlantedRule> rules;
};

nlohmann::ordered_json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& doc);

struct Dataset {
    std::vector<CdrRecord> cdr;
    std::vector<MetricSeries> kqi;
    std::vector<MetricSeries> kpi;
};

struct GeneratedScenario {
    ScenarioSpec spec;
    MetricCatalog catalog;
    Dataset data;
    GroundTruth truth;
};

GeneratedScenario generate(const ScenarioSpec& spec, std::uint64_t seed);

// cdr.csv, kqi.csv, kpi.csv, truth.json, catalog.json, spec.json, config.json
void write_scenario(const GeneratedScenario& scenario, const std::filesystem::path& dir);

struct EvalReport {
    std::size_t detected = 0;
    std::size_t planted = 0;
    std::size_t matched_detected = 0;
    std::size_t matched_planted = 0;
    double precision = 1.0;
    double recall = 1.0;
    std::size_t rca_evaluated = 0;
    std::size_t rca_correct = 0;
    double rca_top1_accuracy = 1.0;

    nlohmann::ordered_json to_json() const;
};

// Empty denominators yield 1.0; the counts show when that happened.
EvalReport evaluate(std::span<const AnomalyEvent> detected, std::span<const DiagnosedEvent> diagnoses,
                    const GroundTruth& truth);

}  // namespace fogdna
