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

#include "fogsim.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "cleaning.hpp"
#include "common.hpp"

namespace fogdna {

std::string to_string(Tier t) {
    switch (t) {
        case Tier::Edge: return "EDGE";
        case Tier::Fog: return "FOG";
        case Tier::Cloud: return "CLOUD";
    }
    return "?";
}

Tier parse_tier(std::string_view text) {
    if (text == "EDGE") return Tier::Edge;
    if (text == "FOG") return Tier::Fog;
    if (text == "CLOUD") return Tier::Cloud;
    throw Error(ErrorKind::InvalidTopology, "unknown tier '" + std::string(text) + "'");
}

std::string to_string(DeploymentStrategy s) {
    switch (s) {
        case DeploymentStrategy::Centralized: return "CENTRALIZED";
        case DeploymentStrategy::EdgeInference: return "EDGE_INFERENCE";
        case DeploymentStrategy::Fog: return "FOG";
    }
    return "?";
}

DeploymentStrategy parse_strategy(std::string_view text) {
    if (text == "CENTRALIZED") return DeploymentStrategy::Centralized;
    if (text == "EDGE_INFERENCE") return DeploymentStrategy::EdgeInference;
    if (text == "FOG") return DeploymentStrategy::Fog;
    throw Error(ErrorKind::Usage, "unknown strategy '" + std::string(text) +
                                      "' (expected CENTRALIZED, EDGE_INFERENCE or FOG)");
}

// --- topology ------------------------------------------------------------------

const TopologyNode& FogTopology::node(const std::string& id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const auto& n) { return n.id == id; });
    if (it == nodes.end()) throw Error(ErrorKind::InvalidTopology, "unknown node '" + id + "'");
    return *it;
}

std::string FogTopology::cloud_id() const {
    for (const auto& n : nodes)
        if (n.tier == Tier::Cloud) return n.id;
    throw Error(ErrorKind::InvalidTopology, "no CLOUD node");
}

std::vector<std::string> FogTopology::ids_of(Tier tier) const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
        if (n.tier == tier) out.push_back(n.id);
    return out;
}

std::vector<std::string> FogTopology::children(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
        if (n.parent == id) out.push_back(n.id);
    return out;
}

std::vector<std::string> FogTopology::cells_under(const std::string& id) const {
    std::set<std::string> edges;
    const auto& n = node(id);
    if (n.tier == Tier::Edge) {
        edges.insert(id);
    } else {
        for (const auto& c : children(id)) {
            if (node(c).tier == Tier::Edge) edges.insert(c);
            else
                for (const auto& e : children(c)) edges.insert(e);
        }
    }
    std::vector<std::string> out;
    for (const auto& [cell, edge] : cell_to_edge)
        if (edges.count(edge)) out.push_back(cell);
    return out;
}

FogTopology build_topology(const nlohmann::json& doc) {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidTopology, m); };
    FogTopology t;
    try {
        for (const auto& n : doc.at("nodes")) {
            TopologyNode node;
            node.id = n.at("id").get<std::string>();
            node.tier = parse_tier(n.at("tier").get<std::string>());
            if (n.contains("parent") && !n.at("parent").is_null()) node.parent = n.at("parent").get<std::string>();
            t.nodes.push_back(std::move(node));
        }
        if (doc.contains("links")) {
            for (const auto& l : doc.at("links")) {
                auto child = l.at("child").get<std::string>();
                LinkSpec spec{l.at("bandwidth").get<double>(), l.at("latency").get<double>()};
                if (!t.uplinks.emplace(child, spec).second) fail("duplicate link for '" + child + "'");
            }
        }
        if (doc.contains("cells")) {
            for (const auto& [cell, edge] : doc.at("cells").items()) t.cell_to_edge[cell] = edge.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("malformed topology: ") + e.what());
    }

    std::map<std::string, const TopologyNode*> by_id;
    for (const auto& n : t.nodes) {
        if (n.id.empty()) fail("node with empty id");
        if (!by_id.emplace(n.id, &n).second) fail("duplicate node id '" + n.id + "'");
    }
    auto clouds = t.ids_of(Tier::Cloud);
    if (clouds.size() != 1) fail("expected exactly one CLOUD node, found " + std::to_string(clouds.size()));
    for (const auto& n : t.nodes) {
        if (n.tier == Tier::Cloud) {
            if (n.parent) fail("CLOUD node '" + n.id + "' must not have a parent");
            continue;
        }
        if (!n.parent) fail("node '" + n.id + "' has no parent");
        auto p = by_id.find(*n.parent);
        if (p == by_id.end()) fail("node '" + n.id + "' has unknown parent '" + *n.parent + "'");
        Tier want = n.tier == Tier::Fog ? Tier::Cloud : Tier::Fog;
        if (p->second->tier != want)
            fail(to_string(n.tier) + " node '" + n.id + "' must be parented to a " + to_string(want) + " node");
        auto l = t.uplinks.find(n.id);
        if (l == t.uplinks.end()) fail("no uplink for node '" + n.id + "'");
        if (!(l->second.bandwidth > 0.0) || !(l->second.latency >= 0.0))
            fail("uplink of '" + n.id + "' needs bandwidth > 0 and latency >= 0");
    }
    for (const auto& [child, link] : t.uplinks) {
        auto n = by_id.find(child);
        if (n == by_id.end() || n->second->tier == Tier::Cloud) fail("link declared for '" + child + "' which has no parent");
    }
    for (const auto& [cell, edge] : t.cell_to_edge) {
        auto n = by_id.find(edge);
        if (n == by_id.end() || n->second->tier != Tier::Edge)
            fail("cell '" + cell + "' assigned to '" + edge + "', which is not an EDGE node");
    }
    return t;
}

nlohmann::ordered_json topology_to_json(const FogTopology& topo) {
    nlohmann::ordered_json doc;
    auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : topo.nodes) {
        nlohmann::ordered_json j{{"id", n.id}, {"tier", to_string(n.tier)}};
        j["parent"] = n.parent ? nlohmann::ordered_json(*n.parent) : nlohmann::ordered_json();
        nodes.push_back(std::move(j));
    }
    auto& links = doc["links"] = nlohmann::ordered_json::array();
    for (const auto& n : topo.nodes) {
        auto l = topo.uplinks.find(n.id);
        if (l != topo.uplinks.end())
            links.push_back({{"child", n.id}, {"bandwidth", l->second.bandwidth}, {"latency", l->second.latency}});
    }
    auto& cells = doc["cells"] = nlohmann::ordered_json::object();
    for (const auto& [cell, edge] : topo.cell_to_edge) cells[cell] = edge;
    return doc;
}

FogTopology default_topology(std::span<const std::string> cells, std::size_t n_fogs, std::size_t edges_per_fog) {
    if (n_fogs == 0 || edges_per_fog == 0) throw Error(ErrorKind::InvalidTopology, "need at least one fog and edge");
    FogTopology t;
    t.nodes.push_back({"cloud", Tier::Cloud, std::nullopt});
    std::vector<std::string> edges;
    for (std::size_t f = 0; f < n_fogs; ++f) {
        std::string fog = "fog-" + std::to_string(f);
        t.nodes.push_back({fog, Tier::Fog, std::string("cloud")});
        t.uplinks[fog] = {125e6, 0.020};
        for (std::size_t e = 0; e < edges_per_fog; ++e) {
            std::string edge = "edge-" + std::to_string(f) + "-" + std::to_string(e);
            t.nodes.push_back({edge, Tier::Edge, fog});
            t.uplinks[edge] = {12.5e6, 0.005};
            edges.push_back(edge);
        }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) t.cell_to_edge[cells[i]] = edges[i % edges.size()];
    return t;
}

// --- scenario ------------------------------------------------------------------

RecordSizes RecordSizes::from_json(const nlohmann::json& doc) {
    RecordSizes s;
    if (!doc.is_object()) return s;
    try {
        if (doc.contains("cdr")) s.cdr = doc.at("cdr").get<std::uint64_t>();
        if (doc.contains("metric_row")) s.metric_row = doc.at("metric_row").get<std::uint64_t>();
        if (doc.contains("transaction")) s.transaction = doc.at("transaction").get<std::uint64_t>();
        if (doc.contains("alert")) s.alert = doc.at("alert").get<std::uint64_t>();
        if (doc.contains("itemset_entry")) s.itemset_entry = doc.at("itemset_entry").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("record_sizes: ") + e.what());
    }
    return s;
}

nlohmann::ordered_json RecordSizes::to_json() const {
    return {{"cdr", cdr},
            {"metric_row", metric_row},
            {"transaction", transaction},
            {"alert", alert},
            {"itemset_entry", itemset_entry}};
}

FogScenario fog_scenario(const GeneratedScenario& g) {
    FogScenario s;
    s.catalog = g.catalog;
    s.cdr = g.data.cdr;
    s.kqi = g.data.kqi;
    s.kpi = g.data.kpi;
    s.sizes = RecordSizes::from_json(g.spec.record_sizes);
    s.settings.apply_json(g.spec.pipeline);
    s.labels = labels_from_json(truth_to_json(g.truth));
    s.built_at = g.spec.end_time();
    return s;
}

// --- simulation ------------------------------------------------------------------

namespace {

struct CellData {
    std::vector<const MetricSeries*> raw_kqi;
    std::vector<const MetricSeries*> raw_kpi;
    std::vector<CdrRecord> cdr;
    // after aggregation, split and cleaning
    std::vector<MetricSeries> kqi_train, kqi_test, kpi_train, kpi_test;
    std::uint64_t raw_train_rows = 0;
    std::uint64_t cdr_train_records = 0;
    std::uint64_t cleaned_train_rows = 0;
};

class Traffic {
public:
    explicit Traffic(const FogTopology& topo) : topo_(topo) {}

    void up(const std::string& child, const std::string& phase, std::uint64_t bytes) {
        if (bytes) phases_[child][phase].first += bytes;
    }
    void down(const std::string& child, const std::string& phase, std::uint64_t bytes) {
        if (bytes) phases_[child][phase].second += bytes;
    }
    // Edge -> fog -> cloud.
    void up_path(const std::string& edge, const std::string& phase, std::uint64_t bytes) {
        up(edge, phase, bytes);
        up(*topo_.node(edge).parent, phase, bytes);
    }
    void down_path(const std::string& edge, const std::string& phase, std::uint64_t bytes) {
        down(edge, phase, bytes);
        down(*topo_.node(edge).parent, phase, bytes);
    }
    double hop_seconds(const std::string& child, std::uint64_t bytes) const {
        const auto& l = topo_.uplinks.at(child);
        return static_cast<double>(bytes) / l.bandwidth + l.latency;
    }
    double path_seconds(const std::string& edge, std::uint64_t bytes) const {
        return hop_seconds(edge, bytes) + hop_seconds(*topo_.node(edge).parent, bytes);
    }

    void fill(CostReport& r) const {
        for (const auto& n : topo_.nodes) {
            if (!n.parent) continue;
            LinkTraffic lt{n.id, *n.parent, 0, 0, {}};
            if (auto it = phases_.find(n.id); it != phases_.end()) lt.phases = it->second;
            for (const auto& [phase, ud] : lt.phases) {
                lt.bytes_up += ud.first;
                lt.bytes_down += ud.second;
                r.phase_bytes[phase] += ud.first + ud.second;
            }
            r.bytes_up += lt.bytes_up;
            r.bytes_down += lt.bytes_down;
            r.links.push_back(std::move(lt));
        }
        r.total_bytes = r.bytes_up + r.bytes_down;
    }

private:
    const FogTopology& topo_;
    std::map<std::string, std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>> phases_;
};

std::uint64_t points_of(const std::vector<MetricSeries>& v) {
    std::uint64_t n = 0;
    for (const auto& s : v) n += s.points.size();
    return n;
}

template <typename F>
std::vector<MetricSeries> gather(const std::map<std::string, CellData>& cells, const std::vector<std::string>& ids,
                                 F member) {
    std::vector<MetricSeries> out;
    for (const auto& id : ids) {
        auto it = cells.find(id);
        if (it == cells.end()) continue;
        const auto& part = it->second.*member;
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

BaselineModel fit_or_empty(std::span<const MetricSeries> train, const PipelineSettings& st, const BoundsTable& bounds) {
    if (train.empty()) return BaselineModel{st.detector, {}, {}};
    return fit_baseline(train, st.detector, bounds);
}

// Raw rows and CDR records of one cell inside [w, w + len).
std::uint64_t window_bytes(const CellData& c, std::int64_t w, std::int64_t len, const RecordSizes& sizes) {
    std::uint64_t rows = 0;
    auto count = [&](const std::vector<const MetricSeries*>& v) {
        for (const auto* s : v) {
            auto it = std::lower_bound(s->points.begin(), s->points.end(), w,
                                       [](const MetricPoint& p, std::int64_t t) { return p.window_start < t; });
            if (it != s->points.end() && it->window_start == w) ++rows;
        }
    };
    count(c.raw_kqi);
    count(c.raw_kpi);
    auto calls = std::count_if(c.cdr.begin(), c.cdr.end(),
                               [&](const CdrRecord& r) { return r.start_time >= w && r.start_time < w + len; });
    return rows * sizes.metric_row + static_cast<std::uint64_t>(calls) * sizes.cdr;
}

}  // namespace

SimulationResult simulate(const FogTopology& topo, DeploymentStrategy strategy, const FogScenario& scn) {
    PipelineSettings st = scn.settings;
    st.use_catalog_bounds = true;
    st.validate();
    const BoundsTable bounds = bounds_from_catalog(scn.catalog);
    const RecordSizes& sizes = scn.sizes;

    std::map<std::string, CellData> cells;
    for (const auto& s : scn.kqi) cells[s.cell_id].raw_kqi.push_back(&s);
    for (const auto& s : scn.kpi) cells[s.cell_id].raw_kpi.push_back(&s);
    for (const auto& r : scn.cdr) cells[r.cell_id].cdr.push_back(r);
    for (const auto& [id, c] : cells)
        if (!topo.cell_to_edge.count(id)) throw Error(ErrorKind::UnassignedCell, "cell '" + id + "' has no EDGE node");

    std::int64_t cdr_window = 0;
    if (auto it = scn.catalog.find(std::string(kCallAttempts)); it != scn.catalog.end()) cdr_window = it->second.window_len;
    if (cdr_window <= 0 && !scn.kqi.empty()) cdr_window = scn.kqi.front().window_len;
    if (cdr_window <= 0) cdr_window = 300;

    // Per-cell preparation is the same wherever it runs, so do it once.
    std::map<std::pair<std::string, std::string>, std::int64_t> window_len_of;
    for (auto& [id, c] : cells) {
        std::vector<MetricSeries> kqi;
        for (const auto* s : c.raw_kqi) kqi.push_back(*s);
        auto agg = aggregate_cdr(c.cdr, cdr_window);
        for (const auto& s : agg) {
            auto test = chrono_split(s, st.train_fraction).test;
            std::int64_t cut = test.points.front().window_start;
            c.cdr_train_records = static_cast<std::uint64_t>(
                std::count_if(c.cdr.begin(), c.cdr.end(), [&](const CdrRecord& r) { return r.start_time < cut; }));
            break;  // every aggregate shares one grid
        }
        kqi.insert(kqi.end(), agg.begin(), agg.end());
        auto pk = prepare_series(kqi, st);
        std::vector<MetricSeries> kpi;
        for (const auto* s : c.raw_kpi) kpi.push_back(*s);
        auto pp = prepare_series(kpi, st);
        for (const auto* s : c.raw_kqi) c.raw_train_rows += chrono_split(*s, st.train_fraction).train.points.size();
        for (const auto* s : c.raw_kpi) c.raw_train_rows += chrono_split(*s, st.train_fraction).train.points.size();
        c.kqi_train = std::move(pk.train);
        c.kqi_test = std::move(pk.test);
        c.kpi_train = std::move(pp.train);
        c.kpi_test = std::move(pp.test);
        c.cleaned_train_rows = points_of(c.kqi_train) + points_of(c.kpi_train);
        for (const auto& s : c.kqi_test) window_len_of[{s.cell_id, s.metric_name}] = s.window_len;
    }

    const std::vector<std::string> edges = topo.ids_of(Tier::Edge);
    const std::vector<std::string> fogs = topo.ids_of(Tier::Fog);
    std::vector<std::string> all_cells;
    for (const auto& [id, c] : cells) all_cells.push_back(id);
    auto cells_of = [&](const std::string& node) {
        std::vector<std::string> out;
        for (const auto& id : topo.cells_under(node))
            if (cells.count(id)) out.push_back(id);
        return out;
    };
    auto edge_of = [&](const std::string& cell) { return topo.cell_to_edge.at(cell); };

    Traffic traffic(topo);
    SimulationResult res;
    CostReport& cost = res.cost;
    cost.strategy = strategy;
    auto train_of = [&](const std::vector<std::string>& ids) {
        auto t = gather(cells, ids, &CellData::kqi_train);
        auto p = gather(cells, ids, &CellData::kpi_train);
        t.insert(t.end(), p.begin(), p.end());
        return t;
    };
    auto sort_events = [](std::vector<AnomalyEvent>& ev) {
        std::stable_sort(ev.begin(), ev.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
            return std::tie(a.cell_id, a.metric_name, a.start_window) <
                   std::tie(b.cell_id, b.metric_name, b.start_window);
        });
    };
    auto event_window_bytes = [&](const AnomalyEvent& e) {
        return window_bytes(cells.at(e.cell_id), e.peak_window, window_len_of.at({e.cell_id, e.metric_name}), sizes);
    };
    // Edge-side inference with a per-edge slice of the model; returns the
    // transactions each edge built, keyed by edge.
    auto edge_inference = [&](const BaselineModel& model) {
        std::map<std::string, std::vector<Transaction>> tx_by_edge;
        for (const auto& edge : edges) {
            auto ids = cells_of(edge);
            if (ids.empty()) continue;
            auto local = restrict_to_cells(model, ids);
            if (!local.entries.empty()) traffic.down_path(edge, "model_download", serialize_model(local).size());
            auto kqi_test = gather(cells, ids, &CellData::kqi_test);
            auto kpi_test = gather(cells, ids, &CellData::kpi_test);
            auto ev = detect_events(local, kqi_test, st);
            tx_by_edge[edge] = build_transactions(ev, kpi_test, local, st.z_symptom);
            res.events.insert(res.events.end(), ev.begin(), ev.end());
        }
        sort_events(res.events);
        return tx_by_edge;
    };

    switch (strategy) {
        case DeploymentStrategy::Centralized: {
            for (const auto& [id, c] : cells) {
                std::uint64_t rows = 0;
                for (const auto* s : c.raw_kqi) rows += s->points.size();
                for (const auto* s : c.raw_kpi) rows += s->points.size();
                traffic.up_path(edge_of(id), "raw_upload", rows * sizes.metric_row + c.cdr.size() * sizes.cdr);
            }
            res.model = fit_or_empty(train_of(all_cells), st, bounds);
            auto kqi_test = gather(cells, all_cells, &CellData::kqi_test);
            auto kpi_test = gather(cells, all_cells, &CellData::kpi_test);
            res.events = detect_events(res.model, kqi_test, st);
            auto tx = build_transactions(res.events, kpi_test, res.model, st.z_symptom);
            auto rules = mine_rare_rules(tx, st.mine);
            res.db = update_db({}, rules, scn.labels, scn.built_at, tx.size());
            for (const auto& e : res.events) {
                const auto& edge = edge_of(e.cell_id);
                traffic.down_path(edge, "alerts", sizes.alert);
                double s = traffic.path_seconds(edge, event_window_bytes(e)) + traffic.path_seconds(edge, sizes.alert);
                cost.latencies.push_back({e.cell_id, e.metric_name, e.peak_window, s});
            }
            cost.model_location = {{"cdr_aggregation", "CLOUD"}, {"training", "CLOUD"},  {"model_merge", "-"},
                                   {"inference", "CLOUD"},       {"mining", "CLOUD"},    {"diagnosis", "CLOUD"}};
            break;
        }
        case DeploymentStrategy::EdgeInference: {
            for (const auto& [id, c] : cells)
                traffic.up_path(edge_of(id), "training_upload",
                                c.raw_train_rows * sizes.metric_row + c.cdr_train_records * sizes.cdr);
            res.model = fit_or_empty(train_of(all_cells), st, bounds);
            auto tx_by_edge = edge_inference(res.model);
            std::vector<Transaction> tx;
            for (const auto& edge : edges) {
                auto it = tx_by_edge.find(edge);
                if (it == tx_by_edge.end()) continue;
                traffic.up_path(edge, "transactions", it->second.size() * sizes.transaction);
                tx.insert(tx.end(), it->second.begin(), it->second.end());
            }
            auto rules = mine_rare_rules(tx, st.mine);
            res.db = update_db({}, rules, scn.labels, scn.built_at, tx.size());
            for (const auto& e : res.events) cost.latencies.push_back({e.cell_id, e.metric_name, e.peak_window, 0.0});
            cost.model_location = {{"cdr_aggregation", "CLOUD"}, {"training", "CLOUD"}, {"model_merge", "-"},
                                   {"inference", "EDGE"},        {"mining", "CLOUD"},   {"diagnosis", "CLOUD"}};
            break;
        }
        case DeploymentStrategy::Fog: {
            std::vector<BaselineModel> partials;
            for (const auto& edge : edges) {
                std::uint64_t rows = 0;
                for (const auto& id : cells_of(edge)) rows += cells.at(id).cleaned_train_rows;
                traffic.up(edge, "training_upload", rows * sizes.metric_row);
            }
            for (const auto& fog : fogs) {
                auto ids = cells_of(fog);
                if (ids.empty()) continue;
                auto partial = fit_or_empty(train_of(ids), st, bounds);
                if (partial.entries.empty()) continue;
                traffic.up(fog, "partial_models", serialize_model(partial).size());
                partials.push_back(std::move(partial));
            }
            res.model = partials.empty() ? BaselineModel{st.detector, {}, {}} : merge_baselines(partials);
            auto tx_by_edge = edge_inference(res.model);
            ItemsetCounts merged(st.mine.max_antecedent);
            for (const auto& fog : fogs) {
                ItemsetCounts counts(st.mine.max_antecedent);
                for (const auto& edge : topo.children(fog)) {
                    auto it = tx_by_edge.find(edge);
                    if (it == tx_by_edge.end()) continue;
                    traffic.up(edge, "transactions", it->second.size() * sizes.transaction);
                    for (const auto& t : it->second) counts.add(t);
                }
                traffic.up(fog, "itemset_counts", counts.entry_count() * sizes.itemset_entry);
                merged.merge(counts);
            }
            auto rules = mine_from_counts(merged, st.mine);
            res.db = update_db({}, rules, scn.labels, scn.built_at, merged.transaction_total());
            if (!res.db.rules.empty()) {
                auto db_bytes = serialize_db(res.db).size();
                for (const auto& fog : fogs)
                    if (!cells_of(fog).empty()) traffic.down(fog, "db_download", db_bytes);
            }
            // Edges ship the event's symptom transaction to their fog node,
            // which diagnoses against its copy of the fingerprint db.
            for (const auto& e : res.events) {
                const auto& edge = edge_of(e.cell_id);
                traffic.down(edge, "alerts", sizes.alert);
                double s = traffic.hop_seconds(edge, sizes.transaction) + traffic.hop_seconds(edge, sizes.alert);
                cost.latencies.push_back({e.cell_id, e.metric_name, e.peak_window, s});
            }
            cost.model_location = {{"cdr_aggregation", "EDGE"}, {"training", "FOG"}, {"model_merge", "CLOUD"},
                                   {"inference", "EDGE"},       {"mining", "FOG+CLOUD"}, {"diagnosis", "FOG"}};
            break;
        }
    }

    traffic.fill(cost);
    for (const auto& l : cost.latencies) {
        cost.mean_latency += l.seconds;
        cost.max_latency = std::max(cost.max_latency, l.seconds);
    }
    if (!cost.latencies.empty()) cost.mean_latency /= static_cast<double>(cost.latencies.size());
    return res;
}

bool compare_models(const BaselineModel& a, const BaselineModel& b) { return a == b; }

bool compare_dbs(const FingerprintDb& a, const FingerprintDb& b) { return a == b; }

nlohmann::ordered_json CostReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["kind"] = "cost_report";
    doc["strategy"] = to_string(strategy);
    doc["total_bytes"] = total_bytes;
    doc["bytes_up"] = bytes_up;
    doc["bytes_down"] = bytes_down;
    doc["phase_bytes"] = phase_bytes;
    auto& jl = doc["links"] = nlohmann::ordered_json::array();
    for (const auto& l : links) {
        nlohmann::ordered_json ph = nlohmann::ordered_json::object();
        for (const auto& [name, ud] : l.phases) ph[name] = {{"up", ud.first}, {"down", ud.second}};
        jl.push_back({{"child", l.child},
                      {"parent", l.parent},
                      {"bytes_up", l.bytes_up},
                      {"bytes_down", l.bytes_down},
                      {"phases", std::move(ph)}});
    }
    doc["events"] = latencies.size();
    doc["mean_latency_s"] = mean_latency;
    doc["max_latency_s"] = max_latency;
    auto& per = doc["latencies"] = nlohmann::ordered_json::array();
    for (const auto& l : latencies)
        per.push_back({{"cell_id", l.cell_id},
                       {"metric_name", l.metric_name},
                       {"peak_window", l.peak_window},
                       {"seconds", l.seconds}});
    nlohmann::ordered_json loc = nlohmann::ordered_json::object();
    for (const auto& [stage, tier] : model_location) loc[stage] = tier;
    doc["model_location"] = std::move(loc);
    return doc;
}

std::string comparison_table(std::span<const CostReport> reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-15s %15s %15s %15s %7s %12s %12s\n", "strategy", "total_bytes", "bytes_up",
                  "bytes_down", "events", "mean_lat_s", "max_lat_s");
    out << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-15s %15llu %15llu %15llu %7zu %12.6f %12.6f\n", to_string(r.strategy).c_str(),
                      static_cast<unsigned long long>(r.total_bytes), static_cast<unsigned long long>(r.bytes_up),
                      static_cast<unsigned long long>(r.bytes_down), r.latencies.size(), r.mean_latency, r.max_latency);
        out << line;
    }
    return out.str();
}

}  // namespace fogdna
