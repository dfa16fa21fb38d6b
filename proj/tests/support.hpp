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

// Shared helpers and reference implementations for the test suites. The
// oracles here are deliberately naive so they can be checked by eye.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "fingerprint.hpp"
#include "fogsim.hpp"
#include "ingest.hpp"
#include "synth.hpp"

namespace fogdna::testing {

// Kind of the fogdna::Error thrown by fn, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorKind> error_kind(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

inline MetricSeries make_series(std::string cell, std::string metric, std::vector<std::optional<double>> values,
                                std::int64_t window_len = 300, std::int64_t start = 0,
                                Polarity pol = Polarity::HigherIsWorse, MetricKind kind = MetricKind::Kqi) {
    MetricSeries s{std::move(cell), std::move(metric), kind, pol, window_len, {}};
    for (std::size_t i = 0; i < values.size(); ++i)
        s.points.push_back({start + static_cast<std::int64_t>(i) * window_len, values[i]});
    return s;
}

// Median and MAD straight from the definition: sort, take the middle (or the
// mean of the two middles).
inline double naive_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double naive_mad(const std::vector<double>& v) {
    const double m = naive_median(v);
    std::vector<double> dev;
    for (double x : v) dev.push_back(std::abs(x - m));
    return naive_median(dev);
}

struct OracleRule {
    std::vector<std::string> antecedent;  // sorted item keys
    std::string consequent;
    std::uint64_t support_count = 0;
    std::uint64_t antecedent_count = 0;
    double confidence = 0.0;
    double lift = 0.0;

    auto operator<=>(const OracleRule& o) const {
        return std::tie(antecedent, consequent, support_count, antecedent_count) <=>
               std::tie(o.antecedent, o.consequent, o.support_count, o.antecedent_count);
    }
    bool operator==(const OracleRule& o) const { return (*this <=> o) == 0; }
};

// Apriori by exhaustion: every subset of the item universe, counted by a
// scan over all transactions.
inline std::set<OracleRule> apriori_oracle(const std::vector<Transaction>& txs, const MineConfig& cfg) {
    std::set<OracleRule> out;
    if (txs.empty()) return out;
    std::set<std::string> universe_set;
    std::map<std::string, std::uint64_t> consequent_n;
    std::vector<std::set<std::string>> sets;
    for (const auto& t : txs) {
        std::set<std::string> s;
        for (const auto& i : t.items) s.insert(i.key());
        universe_set.insert(s.begin(), s.end());
        sets.push_back(std::move(s));
        consequent_n[t.consequent]++;
    }
    const std::vector<std::string> universe(universe_set.begin(), universe_set.end());
    const std::size_t n_items = universe.size();
    const double total = static_cast<double>(txs.size());
    const auto ceiling = static_cast<std::uint64_t>(std::ceil(cfg.s_max_fraction * total));
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n_items); ++mask) {
        std::vector<std::string> x;
        for (std::size_t b = 0; b < n_items; ++b)
            if (mask >> b & 1) x.push_back(universe[b]);
        if (x.size() > cfg.max_antecedent) continue;
        std::uint64_t all = 0;
        std::map<std::string, std::uint64_t> with_q;
        for (std::size_t i = 0; i < txs.size(); ++i) {
            bool has = std::all_of(x.begin(), x.end(), [&](const std::string& k) { return sets[i].count(k) > 0; });
            if (!has) continue;
            ++all;
            with_q[txs[i].consequent]++;
        }
        for (const auto& [q, c] : with_q) {
            if (c < cfg.s_min_count || c > ceiling) continue;
            double conf = static_cast<double>(c) / static_cast<double>(all);
            double lift = conf / (static_cast<double>(consequent_n[q]) / total);
            if (conf < cfg.c_min || lift < cfg.lift_min) continue;
            out.insert({x, q, c, all, conf, lift});
        }
    }
    return out;
}

inline std::set<OracleRule> as_oracle_rules(const std::vector<Fingerprint>& rules) {
    std::set<OracleRule> out;
    for (const auto& r : rules) {
        OracleRule o{{}, r.consequent, r.support_count, r.antecedent_count, r.confidence, r.lift};
        for (const auto& i : r.antecedent) o.antecedent.push_back(i.key());
        out.insert(std::move(o));
    }
    return out;
}

// Random mining instance: up to max_items items spread over a few KPIs and
// 1-3 consequents, with some structure so that rules actually appear.
inline std::vector<Transaction> random_transactions(std::mt19937_64& rng, std::size_t max_items, std::size_t max_tx) {
    std::uniform_int_distribution<std::size_t> n_items_d(1, max_items), n_tx_d(1, max_tx), n_q_d(1, 3);
    const std::size_t n_items = n_items_d(rng);
    const std::size_t n_tx = n_tx_d(rng);
    const std::size_t n_q = n_q_d(rng);
    std::vector<SymptomItem> items;
    for (std::size_t i = 0; i < n_items; ++i)
        items.push_back({"kpi" + std::to_string(i / 2), i % 2 ? SymptomState::Low : SymptomState::High});
    std::vector<double> p(n_items);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : p) x = 0.05 + 0.6 * u(rng);
    std::vector<Transaction> txs;
    for (std::size_t t = 0; t < n_tx; ++t) {
        Transaction tx;
        std::size_t q = std::uniform_int_distribution<std::size_t>(0, n_q - 1)(rng);
        tx.consequent = "kqi" + std::to_string(q);
        for (std::size_t i = 0; i < n_items; ++i) {
            // items correlate with the consequent index to give lift > 1
            double boost = (i % n_q == q) ? 0.3 : 0.0;
            if (u(rng) < std::min(0.95, p[i] + boost)) tx.items.push_back(items[i]);
        }
        canonicalize(tx.items);
        tx.key = {"c" + std::to_string(t), static_cast<std::int64_t>(t) * 300};
        txs.push_back(std::move(tx));
    }
    return txs;
}

// Random rarity band and thresholds, wide enough that every filter bites
// somewhere across a few hundred draws.
inline MineConfig random_mine_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MineConfig cfg;
    cfg.s_min_count = 1 + rng() % 4;
    cfg.s_max_fraction = 0.05 + 0.95 * u(rng);
    cfg.c_min = 0.2 + 0.8 * u(rng);
    cfg.lift_min = 2.0 * u(rng);
    cfg.max_antecedent = 1 + rng() % 5;
    return cfg;
}

// Random subset of a small symptom universe (three KPIs, both states).
inline std::vector<SymptomItem> random_item_set(std::mt19937_64& rng) {
    std::vector<SymptomItem> out;
    const auto mask = rng() % 64;
    for (unsigned b = 0; b < 6; ++b)
        if (mask >> b & 1) out.push_back({"kpi" + std::to_string(b / 2), b % 2 ? SymptomState::Low : SymptomState::High});
    canonicalize(out);
    return out;
}

// Default metrics and causes on a smaller grid.
inline ScenarioSpec small_spec(std::size_t n_cells, std::int64_t days, std::size_t n_anomalies,
                               std::uint64_t plan_seed = 1) {
    return spec_from_json(
        {{"n_cells", n_cells}, {"days", days}, {"n_anomalies", n_anomalies}, {"plan_seed", plan_seed}});
}

// Tree with 2-8 fog nodes, 1-3 edges under each and cells dealt to edges at
// random, so every fog sees an arbitrary slice of the data.
inline FogTopology random_topology(std::mt19937_64& rng, std::span<const std::string> cells) {
    FogTopology t;
    t.nodes.push_back({"cloud", Tier::Cloud, std::nullopt});
    std::vector<std::string> edges;
    const std::size_t n_fogs = 2 + rng() % 7;
    for (std::size_t f = 0; f < n_fogs; ++f) {
        std::string fog = "fog-" + std::to_string(f);
        t.nodes.push_back({fog, Tier::Fog, std::string("cloud")});
        t.uplinks[fog] = {1e6 * static_cast<double>(1 + rng() % 200), 0.001 * static_cast<double>(rng() % 50)};
        const std::size_t n_edges = 1 + rng() % 3;
        for (std::size_t e = 0; e < n_edges; ++e) {
            std::string edge = fog + "-edge-" + std::to_string(e);
            t.nodes.push_back({edge, Tier::Edge, fog});
            t.uplinks[edge] = {1e5 * static_cast<double>(1 + rng() % 200), 0.001 * static_cast<double>(rng() % 20)};
            edges.push_back(edge);
        }
    }
    for (const auto& c : cells) t.cell_to_edge[c] = edges[rng() % edges.size()];
    return t;
}

}  // namespace fogdna::testing
