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

#include <random>

#include "doctest.h"
#include "fogsim.hpp"
#include "support.hpp"

using namespace fogdna;
using fogdna::testing::error_kind;
using fogdna::testing::random_topology;
using fogdna::testing::small_spec;

namespace {

nlohmann::json minimal_topology() {
    return nlohmann::json::parse(R"({
      "nodes": [{"id": "cloud", "tier": "CLOUD"},
                {"id": "fog", "tier": "FOG", "parent": "cloud"},
                {"id": "e1", "tier": "EDGE", "parent": "fog"},
                {"id": "e2", "tier": "EDGE", "parent": "fog"}],
      "links": [{"child": "fog", "bandwidth": 1e8, "latency": 0.02},
                {"child": "e1", "bandwidth": 1e7, "latency": 0.005},
                {"child": "e2", "bandwidth": 1e7, "latency": 0.005}],
      "cells": {"c1": "e1", "c2": "e1", "c3": "e2", "c4": "e2"}})");
}

// One cell, one call an hour and nothing else, so training covers every hour.
FogScenario cdr_only(std::size_t n_records) {
    FogScenario s;
    for (std::size_t i = 0; i < n_records; ++i)
        s.cdr.push_back({"c1", static_cast<std::int64_t>(i) * 3600 + 10, 60.0, false, "a", "b"});
    s.catalog[std::string(kCallAttempts)] = {MetricKind::Kqi, Polarity::LowerIsWorse, 300, std::make_pair(0.0, 10.0)};
    s.catalog[std::string(kDropRate)] = {MetricKind::Kqi, Polarity::HigherIsWorse, 300, std::make_pair(0.0, 1.0)};
    s.catalog[std::string(kMeanDuration)] = {MetricKind::Kqi, Polarity::LowerIsWorse, 300, std::make_pair(0.0, 600.0)};
    return s;
}

std::uint64_t sum_links(const CostReport& c) {
    std::uint64_t n = 0;
    for (const auto& l : c.links) n += l.bytes_up + l.bytes_down;
    return n;
}

}  // namespace

TEST_CASE("minimal topology is valid") {
    auto t = build_topology(minimal_topology());
    CHECK(t.nodes.size() == 4);
    CHECK(t.cloud_id() == "cloud");
    CHECK(t.children("fog") == std::vector<std::string>{"e1", "e2"});
    CHECK(t.cells_under("fog").size() == 4);
    CHECK(t.cells_under("e2") == std::vector<std::string>{"c3", "c4"});
    auto again = build_topology(topology_to_json(t));
    CHECK(topology_to_json(again).dump() == topology_to_json(t).dump());
}

TEST_CASE("topology rule violations") {
    auto doc = minimal_topology();
    auto bad = doc;
    bad["nodes"].push_back({{"id", "cloud2"}, {"tier", "CLOUD"}});
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
    bad = doc;
    bad["nodes"][2]["parent"] = "cloud";
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
    bad = doc;
    bad["links"].erase(1);
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
    bad = doc;
    bad["cells"]["c5"] = "fog";
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
    bad = doc;
    bad["nodes"][1]["tier"] = "MIST";
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
    bad = doc;
    bad["links"][0]["bandwidth"] = 0;
    CHECK(error_kind([&] { build_topology(bad); }) == ErrorKind::InvalidTopology);
}

TEST_CASE("default topology shape") {
    std::vector<std::string> cells{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"};
    auto t = default_topology(cells);
    CHECK(t.ids_of(Tier::Fog).size() == 5);
    CHECK(t.ids_of(Tier::Edge).size() == 10);
    CHECK(t.cell_to_edge.at("a") == t.cell_to_edge.at("k"));
    CHECK(t.cell_to_edge.at("a") != t.cell_to_edge.at("b"));
}

TEST_CASE("strategy names") {
    CHECK(parse_strategy("FOG") == DeploymentStrategy::Fog);
    CHECK(parse_strategy("EDGE_INFERENCE") == DeploymentStrategy::EdgeInference);
    CHECK(to_string(DeploymentStrategy::Centralized) == "CENTRALIZED");
    CHECK(error_kind([] { parse_strategy("MESH"); }) == ErrorKind::Usage);
}

TEST_CASE("100 records of 64 bytes cross both links once") {
    auto doc = minimal_topology();
    doc["cells"] = {{"c1", "e1"}};
    auto t = build_topology(doc);
    auto scn = cdr_only(100);
    CHECK(scn.sizes.cdr == 64);
    auto r = simulate(t, DeploymentStrategy::Centralized, scn);
    CHECK(r.events.empty());
    for (const auto& l : r.cost.links) {
        if (l.child == "e2") {
            CHECK(l.bytes_up == 0);
            continue;
        }
        CHECK(l.bytes_up == 6400);
        CHECK(l.bytes_down == 0);
    }
    CHECK(r.cost.total_bytes == 12800);

    auto fog = simulate(t, DeploymentStrategy::Fog, scn);
    CHECK(compare_models(fog.model, r.model));
    CHECK(compare_dbs(fog.db, r.db));
}

TEST_CASE("zero-record scenario moves no bytes") {
    auto t = build_topology(minimal_topology());
    FogScenario empty;
    for (auto s : {DeploymentStrategy::Centralized, DeploymentStrategy::EdgeInference, DeploymentStrategy::Fog}) {
        auto r = simulate(t, s, empty);
        CHECK(r.cost.total_bytes == 0);
        CHECK(r.cost.bytes_up == 0);
        CHECK(r.cost.bytes_down == 0);
        for (const auto& l : r.cost.links) CHECK(l.bytes_up + l.bytes_down == 0);
        CHECK(r.model.entries.empty());
        CHECK(r.db.rules.empty());
    }
}

TEST_CASE("unassigned cells are refused") {
    auto doc = minimal_topology();
    doc["cells"] = {{"c2", "e1"}};
    CHECK(error_kind([&] { simulate(build_topology(doc), DeploymentStrategy::Fog, cdr_only(40)); }) ==
          ErrorKind::UnassignedCell);
}

TEST_CASE("model and db comparison") {
    auto g = generate(small_spec(3, 3, 1), 2);
    auto scn = fog_scenario(g);
    auto t = default_topology(g.spec.cell_ids(), 2, 1);
    auto r = simulate(t, DeploymentStrategy::Centralized, scn);
    CHECK(compare_models(r.model, r.model));
    auto m = r.model;
    auto& e = m.entries.begin()->second;
    auto counts = e.sketch.counts();
    counts[0] += 1;
    e.sketch = HistogramSketch::from_parts(e.sketch.lo(), e.sketch.hi(), counts, e.sketch.underflow(),
                                           e.sketch.overflow());
    CHECK_FALSE(compare_models(r.model, m));
    auto d = r.db;
    d.transaction_total += 1;
    CHECK_FALSE(compare_dbs(r.db, d));
}

TEST_CASE("FOG reproduces CENTRALIZED on random trees, bytes reconcile, reports are deterministic") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        auto spec = small_spec(4 + rng() % 6, 3 + static_cast<std::int64_t>(rng() % 3), 2 + rng() % 4, rng());
        auto g = generate(spec, rng());
        auto scn = fog_scenario(g);
        auto cells = spec.cell_ids();
        auto topo = random_topology(rng, cells);
        auto central = simulate(topo, DeploymentStrategy::Centralized, scn);
        auto edge = simulate(topo, DeploymentStrategy::EdgeInference, scn);
        auto fog = simulate(topo, DeploymentStrategy::Fog, scn);
        CHECK(compare_models(fog.model, central.model));
        CHECK(compare_dbs(fog.db, central.db));
        CHECK(compare_models(edge.model, central.model));
        CHECK(compare_dbs(edge.db, central.db));
        CHECK(fog.events == central.events);
        for (const auto* r : {&central, &edge, &fog}) {
            CHECK(sum_links(r->cost) == r->cost.total_bytes);
            CHECK(r->cost.bytes_up + r->cost.bytes_down == r->cost.total_bytes);
            std::uint64_t phases = 0;
            for (const auto& [name, n] : r->cost.phase_bytes) phases += n;
            CHECK(phases == r->cost.total_bytes);
        }
        CHECK(simulate(topo, DeploymentStrategy::Fog, scn).cost.to_json().dump() == fog.cost.to_json().dump());
    }
}

TEST_CASE("centralized raw upload is rows times record size") {
    auto g = generate(small_spec(3, 3, 1), 4);
    auto scn = fog_scenario(g);
    auto doc = minimal_topology();
    doc["cells"] = {{"c000", "e1"}, {"c001", "e1"}, {"c002", "e2"}};
    auto r = simulate(build_topology(doc), DeploymentStrategy::Centralized, scn);
    std::uint64_t expect = 0;
    for (const auto* group : {&g.data.kqi, &g.data.kpi})
        for (const auto& s : *group)
            if (s.cell_id != "c002") expect += s.points.size() * scn.sizes.metric_row;
    for (const auto& c : g.data.cdr)
        if (c.cell_id != "c002") expect += scn.sizes.cdr;
    for (const auto& l : r.cost.links)
        if (l.child == "e1") CHECK(l.phases.at("raw_upload").first == expect);
}

TEST_CASE("comparison table lists each strategy") {
    CostReport a, b;
    b.strategy = DeploymentStrategy::Fog;
    std::vector<CostReport> rs{a, b};
    auto text = comparison_table(rs);
    CHECK(text.find("CENTRALIZED") != std::string::npos);
    CHECK(text.find("FOG") != std::string::npos);
}
