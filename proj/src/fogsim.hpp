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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "fingerprint.hpp"
#include "ingest.hpp"
#include "json.hpp"
#include "pipeline.hpp"
#include "postfilter.hpp"
#include "synth.hpp"

namespace fogdna {

enum class Tier { Edge, Fog, Cloud };
std::string to_string(Tier t);
Tier parse_tier(std::string_view text);

struct TopologyNode {
    std::string id;
    Tier tier = Tier::Edge;
    std::optional<std::string> parent;
};

struct LinkSpec {
    double bandwidth = 1.0;  // bytes per second
    double latency = 0.0;    // seconds
};

struct FogTopology {
    std::vector<TopologyNode> nodes;
    std::map<std::string, LinkSpec> uplinks;         // child id -> link to its parent
    std::map<std::string, std::string> cell_to_edge;

    const TopologyNode& node(const std::string& id) const;
    std::string cloud_id() const;
    std::vector<std::string> ids_of(Tier tier) const;       // in declaration order
    std::vector<std::string> children(const std::string& id) const;
    std::vector<std::string> cells_under(const std::string& id) const;  // sorted
};

FogTopology build_topology(const nlohmann::json& doc);
nlohmann::ordered_json topology_to_json(const FogTopology& topo);

// One cloud, n_fogs fog nodes, edges_per_fog edges under each, cells dealt
// round-robin over the edges. Uniform links per tier.
FogTopology default_topology(std::span<const std::string> cells, std::size_t n_fogs = 5,
                             std::size_t edges_per_fog = 2);

enum class DeploymentStrategy { Centralized, EdgeInference, Fog };
std::string to_string(DeploymentStrategy s);
DeploymentStrategy parse_strategy(std::string_view text);

// Fixed serialized sizes in bytes.
struct RecordSizes {
    std::uint64_t cdr = 64;
    std::uint64_t metric_row = 32;
    std::uint64_t transaction = 64;
    std::uint64_t alert = 128;
    std::uint64_t itemset_entry = 48;

    static RecordSizes from_json(const nlohmann::json& doc);
    nlohmann::ordered_json to_json() const;
};

struct FogScenario {
    MetricCatalog catalog;
    std::vector<CdrRecord> cdr;
    std::vector<MetricSeries> kqi;
    std::vector<MetricSeries> kpi;
    RecordSizes sizes;
    PipelineSettings settings;
    LabelMap labels;
    std::int64_t built_at = 0;
};

FogScenario fog_scenario(const GeneratedScenario& generated);

struct LinkTraffic {
    std::string child;
    std::string parent;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> phases;  // phase -> (up, down)
};

struct EventLatency {
    std::string cell_id;
    std::string metric_name;
    std::int64_t peak_window = 0;
    double seconds = 0.0;
};

struct CostReport {
    DeploymentStrategy strategy = DeploymentStrategy::Centralized;
    std::vector<LinkTraffic> links;  // topology order
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::uint64_t total_bytes = 0;
    std::map<std::string, std::uint64_t> phase_bytes;
    std::vector<EventLatency> latencies;
    double mean_latency = 0.0;
    double max_latency = 0.0;
    std::map<std::string, std::string> model_location;  // stage -> tier

    nlohmann::ordered_json to_json() const;
};

struct SimulationResult {
    CostReport cost;
    BaselineModel model;
    FingerprintDb db;
    std::vector<AnomalyEvent> events;
};

// Static flow accounting: a transfer costs bytes / bandwidth + latency per hop,
// node compute time is zero. Sketch bounds always come from the catalog.
SimulationResult simulate(const FogTopology& topo, DeploymentStrategy strategy, const FogScenario& scenario);

bool compare_models(const BaselineModel& a, const BaselineModel& b);
bool compare_dbs(const FingerprintDb& a, const FingerprintDb& b);

std::string comparison_table(std::span<const CostReport> reports);

}  // namespace fogdna
