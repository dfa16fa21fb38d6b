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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// The end-to-end criteria drive the shared library through its C header; the
// property criteria call the core directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "baseline.hpp"
#include "common.hpp"
#include "fingerprint.hpp"
#include "fogdna/fogdna.h"
#include "fogsim.hpp"
#include "ingest.hpp"
#include "postfilter.hpp"
#include "rca.hpp"
#include "support.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using namespace fogdna;
using namespace fogdna::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path g_work;

std::string paths(std::initializer_list<std::pair<const char*, fs::path>> kv) {
    nlohmann::json doc;
    for (const auto& [k, v] : kv) doc["paths"][k] = v.string();
    return doc.dump();
}

// Runs one pipeline command through the C API; throws with the library's
// message on failure.
std::string run(const char* command, const fs::path& config, const std::string& overrides) {
    fogdna_context* ctx = fogdna_context_new();
    auto st = fogdna_run(ctx, command, config.empty() ? nullptr : config.string().c_str(), overrides.c_str());
    std::string out = fogdna_last_output(ctx), err = fogdna_last_error(ctx);
    fogdna_context_free(ctx);
    if (st != FOGDNA_OK) throw std::runtime_error(std::string(command) + ": " + err);
    return out;
}

// gen, train and detect over one scenario directory; returns its config path.
fs::path generate_and_detect(const fs::path& dir, const std::string& spec_json) {
    fs::create_directories(dir);
    std::string gen = paths({{"out", dir / "data"}});
    if (!spec_json.empty()) {
        write_file(dir / "spec.json", spec_json);
        gen = paths({{"spec", dir / "spec.json"}, {"out", dir / "data"}});
    }
    run("gen", {}, gen);
    auto data = dir / "data";
    auto cfg = data / "config.json";
    run("train", cfg,
        paths({{"kqi", data / "kqi.csv"}, {"kpi", data / "kpi.csv"}, {"cdr", data / "cdr.csv"},
               {"catalog", data / "catalog.json"}, {"out", dir / "model.json"}}));
    run("detect", cfg,
        paths({{"kqi", data / "kqi.csv"}, {"cdr", data / "cdr.csv"}, {"catalog", data / "catalog.json"},
               {"model", dir / "model.json"}, {"out", dir / "events.jsonl"}}));
    return cfg;
}

Outcome miner_matches_oracle() {
    std::mt19937_64 rng(20260101);
    int mismatches = 0;
    std::size_t rules = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto txs = random_transactions(rng, 12, 64);
        auto cfg = random_mine_config(rng);
        auto got = as_oracle_rules(mine_rare_rules(txs, cfg));
        if (got != apriori_oracle(txs, cfg)) ++mismatches;
        rules += got.size();
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches, " + std::to_string(rules) + " rules"};
}

Outcome fog_equals_centralized() {
    std::mt19937_64 rng(20260202);
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto spec = small_spec(4 + rng() % 8, 3 + static_cast<std::int64_t>(rng() % 3), 2 + rng() % 4, rng());
        auto scn = fog_scenario(generate(spec, rng()));
        auto cells = spec.cell_ids();
        auto topo = random_topology(rng, cells);
        auto central = simulate(topo, DeploymentStrategy::Centralized, scn);
        auto fog = simulate(topo, DeploymentStrategy::Fog, scn);
        if (!compare_models(fog.model, central.model) || !compare_dbs(fog.db, central.db)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 50 scenarios"};
}

Outcome detector_statistics() {
    std::mt19937_64 rng(20260303);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::lognormal_distribution<double> ln(1.0, 1.0);
    std::uniform_real_distribution<double> ud(-50.0, 50.0);
    int outside = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(5 + rng() % 300);
        for (auto& x : v) {
            switch (trial % 4) {
                case 0: x = 40.0 + 12.0 * nd(rng); break;
                case 1: x = ln(rng); break;
                case 2: x = ud(rng); break;
                default: x = std::round(ud(rng) / 10.0); break;  // heavy ties
            }
        }
        auto s = make_series("c1", "q", {v.begin(), v.end()}, 86400);
        DetectorConfig dc;
        dc.min_samples = 1;
        auto m = fit_baseline(std::span(&s, 1), dc);
        const auto& sk = m.entries.begin()->second.sketch;
        auto mm = sk.median_mad();
        if (std::abs(mm.median - naive_median(v)) > sk.bin_width() || std::abs(mm.mad - naive_mad(v)) > sk.bin_width())
            ++outside;
    }

    // The 1e-9 term in the denominator moves a score by eps / (1.4826 MAD)
    // relative, so samples are kept where that stays under 1e-9 both before
    // and after the transform.
    std::uniform_real_distribution<double> log_a(-2.0, 2.0), ub(-1000.0, 1000.0);
    int checked = 0, broken = 0;
    double worst = 0.0;
    while (checked < 1000) {
        std::vector<double> v(5 + rng() % 80);
        for (auto& x : v) x = 30.0 * nd(rng);
        double x = 120.0 * nd(rng);
        double a = std::pow(10.0, log_a(rng)), b = ub(rng);
        if (kMadConsistency * exact_median_mad(v).mad * std::min(a, 1.0) < 1.0) continue;
        std::vector<double> t;
        for (double y : v) t.push_back(a * y + b);
        auto s0 = exact_robust_score(v, x, Polarity::HigherIsWorse);
        auto s1 = exact_robust_score(t, a * x + b, Polarity::HigherIsWorse);
        double rel = s0.score > 0 ? std::abs(s1.score - s0.score) / s0.score : std::abs(s1.score);
        worst = std::max(worst, rel);
        if (rel > 1e-9 || s1.direction != s0.direction) ++broken;
        ++checked;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/1000 outside one bin, %d/1000 affine violations, worst rel %.2e", outside,
                  broken, worst);
    return {outside == 0 && broken == 0, buf};
}

Outcome end_to_end() {
    auto dir = g_work / "e2e";
    auto cfg = generate_and_detect(dir, "");
    auto data = dir / "data";
    run("mine", cfg,
        paths({{"events", dir / "events.jsonl"}, {"kpi", data / "kpi.csv"}, {"catalog", data / "catalog.json"},
               {"model", dir / "model.json"}, {"labels", data / "truth.json"}, {"out", dir / "db.json"}}));
    run("diagnose", cfg,
        paths({{"db", dir / "db.json"}, {"model", dir / "model.json"}, {"events", dir / "events.jsonl"},
               {"kpi", data / "kpi.csv"}, {"catalog", data / "catalog.json"}, {"out", dir / "diagnoses.jsonl"}}));
    auto report = nlohmann::json::parse(run(
        "eval", {},
        paths({{"events", dir / "events.jsonl"}, {"diagnoses", dir / "diagnoses.jsonl"}, {"truth", data / "truth.json"}})));
    double recall = report.at("recall"), precision = report.at("precision"), rca = report.at("rca_top1_accuracy");
    std::size_t evaluated = report.at("rca_evaluated");
    char buf[160];
    std::snprintf(buf, sizeof buf, "recall %.3f, precision %.3f, RCA top-1 %.3f over %zu matched", recall, precision,
                  rca, evaluated);
    return {recall >= 0.9 && precision >= 0.8 && rca >= 0.9 && evaluated > 0, buf};
}

Outcome false_alarm_floor() {
    auto dir = g_work / "quiet";
    auto spec = spec_to_json(default_scenario(0)).dump(2) + "\n";
    generate_and_detect(dir, spec);
    auto events = parse_events(read_file(dir / "events.jsonl"));

    auto data = dir / "data";
    auto catalog = load_catalog(data / "catalog.json");
    auto truth = truth_from_json(nlohmann::json::parse(read_file(data / "truth.json")));
    auto kqi = load_metric_csv(data / "kqi.csv", MetricKind::Kqi, catalog);
    auto cdr = aggregate_cdr(load_cdr(data / "cdr.csv"), kqi.front().window_len);
    std::size_t test_windows = 0;
    for (const auto* set : {&kqi, &cdr})
        for (const auto& s : *set)
            for (const auto& p : s.points)
                if (p.window_start >= truth.test_start) ++test_windows;
    std::size_t flagged = 0;
    for (const auto& e : events)
        flagged += static_cast<std::size_t>((e.end_window - e.start_window) / kqi.front().window_len + 1);
    double frac = test_windows ? static_cast<double>(flagged) / static_cast<double>(test_windows) : 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu events covering %zu of %zu test windows (%.4f%%)", events.size(), flagged,
                  test_windows, 100.0 * frac);
    return {test_windows > 0 && frac <= 0.001, buf};
}

Outcome bandwidth_ordering() {
    auto spec = default_scenario();
    auto scn = fog_scenario(generate(spec, spec.seed));
    auto cells = spec.cell_ids();
    auto topo = default_topology(cells);
    auto central = simulate(topo, DeploymentStrategy::Centralized, scn).cost;
    auto edge = simulate(topo, DeploymentStrategy::EdgeInference, scn).cost;
    auto fog = simulate(topo, DeploymentStrategy::Fog, scn).cost;
    char buf[240];
    std::snprintf(buf, sizeof buf, "bytes FOG %llu < CENTRALIZED %llu; latency EDGE %.4f <= FOG %.4f <= CENTRALIZED %.4f",
                  static_cast<unsigned long long>(fog.total_bytes), static_cast<unsigned long long>(central.total_bytes),
                  edge.mean_latency, fog.mean_latency, central.mean_latency);
    return {fog.total_bytes < central.total_bytes && edge.mean_latency <= fog.mean_latency &&
                fog.mean_latency <= central.mean_latency && !fog.latencies.empty(),
            buf};
}

Outcome format_properties() {
    std::mt19937_64 rng(20260707);
    int triangle = 0;
    for (int i = 0; i < 10000; ++i) {
        auto a = random_item_set(rng), b = random_item_set(rng), c = random_item_set(rng);
        if (jaccard_distance(a, c) > jaccard_distance(a, b) + jaccard_distance(b, c) + 1e-12) ++triangle;
    }

    // Every artifact of the end-to-end run must re-serialize to the same bytes.
    std::vector<std::string> unstable;
    auto check = [&](const fs::path& p, const std::function<std::string(const std::string&)>& again) {
        auto text = read_file(p);
        if (text.empty() || again(text) != text) unstable.push_back(p.filename().string());
    };
    auto json2 = [](const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; };
    auto dir = g_work / "e2e";
    auto data = dir / "data";
    auto catalog = load_catalog(data / "catalog.json");
    auto parse = [](const std::string& t) { return nlohmann::json::parse(t); };
    check(data / "kqi.csv", [&](const std::string& t) { return serialize_metric_csv(parse_metric_csv(t, MetricKind::Kqi, catalog)); });
    check(data / "kpi.csv", [&](const std::string& t) { return serialize_metric_csv(parse_metric_csv(t, MetricKind::Kpi, catalog)); });
    check(data / "cdr.csv", [](const std::string& t) { return serialize_cdr(parse_cdr(std::string_view(t))); });
    check(data / "catalog.json", [&](const std::string& t) { return json2(catalog_to_json(catalog_from_json(parse(t)))); });
    check(data / "spec.json", [&](const std::string& t) { return json2(spec_to_json(spec_from_json(parse(t)))); });
    check(data / "truth.json", [&](const std::string& t) { return json2(truth_to_json(truth_from_json(parse(t)))); });
    check(dir / "model.json", [&](const std::string& t) { return serialize_model(model_from_json(parse(t))); });
    check(dir / "db.json", [&](const std::string& t) { return serialize_db(db_from_json(parse(t))); });
    check(dir / "events.jsonl", [](const std::string& t) { return serialize_events(parse_events(t)); });
    check(dir / "diagnoses.jsonl", [](const std::string& t) { return serialize_diagnoses(parse_diagnoses(t)); });
    auto spec = load_spec(data / "spec.json");
    auto cells = spec.cell_ids();
    write_file(dir / "topology.json", json2(topology_to_json(default_topology(cells))));
    check(dir / "topology.json", [&](const std::string& t) { return json2(topology_to_json(build_topology(parse(t)))); });

    int monotone = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<bool> flags(1 + rng() % 200);
        const double p = static_cast<double>(rng() % 100) / 100.0;
        for (std::size_t k = 0; k < flags.size(); ++k) flags[k] = static_cast<double>(rng() % 1000) < 1000.0 * p;
        const std::size_t n = 1 + rng() % 12;
        std::vector<bool> prev = flags;  // m = 1 keeps every flag
        for (std::size_t m = 1; m <= n; ++m) {
            auto cur = persistence_filter(flags, m, n);
            for (std::size_t k = 0; k < flags.size(); ++k)
                if (cur[k] && !prev[k]) {
                    ++monotone;
                    break;
                }
            prev = cur;
        }
    }

    std::string detail = std::to_string(triangle) + " triangle violations, " + std::to_string(unstable.size()) +
                         " unstable files, " + std::to_string(monotone) + " monotonicity violations";
    for (const auto& u : unstable) detail += " [" + u + "]";
    return {triangle == 0 && unstable.empty() && monotone == 0, detail};
}

}  // namespace

int main() {
    g_work = fs::temp_directory_path() / "fogdna_acceptance";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria{
        {"miner equals the Apriori oracle on 200 instances", 30, miner_matches_oracle},
        {"FOG equals CENTRALIZED on 50 random partitions", 60, fog_equals_centralized},
        {"histogram median/MAD within one bin; affine invariance 1e-9", 0, detector_statistics},
        {"end-to-end default scenario", 300, end_to_end},
        {"false-alarm floor on the zero-anomaly scenario", 0, false_alarm_floor},
        {"bandwidth and latency ordering on the default scenario", 0, bandwidth_ordering},
        {"Jaccard triangle, byte-identical round-trips, filter monotonicity", 0, format_properties},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
            o.pass = false;
            o.detail += ", over the time budget";
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu: %s (%s; %.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    fs::remove_all(g_work);
    return failed ? 1 : 0;
}
