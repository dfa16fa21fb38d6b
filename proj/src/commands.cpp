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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "baseline.hpp"
#include "cleaning.hpp"
#include "common.hpp"
#include "fingerprint.hpp"
#include "fogsim.hpp"
#include "ingest.hpp"
#include "postfilter.hpp"
#include "rca.hpp"
#include "synth.hpp"

namespace fogdna {

namespace {

const std::set<std::string>& known_paths() {
    static const std::set<std::string> keys{"spec",   "out",       "in",    "kqi",      "kpi",  "cdr",
                                            "catalog", "model",    "events", "db",      "db_in", "labels",
                                            "diagnoses", "truth",  "topology", "data",  "clean_report"};
    return keys;
}

nlohmann::json parse_json_file(const std::string& path, ErrorKind on_bad) {
    auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw Error(on_bad, "'" + path + "' is not valid JSON");
    return doc;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& file_doc, const nlohmann::json& overrides) {
    nlohmann::json doc = file_doc.is_null() ? nlohmann::json::object() : file_doc;
    if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
    if (!overrides.is_null()) {
        if (!overrides.is_object()) throw Error(ErrorKind::InvalidConfig, "overrides must be a JSON object");
        doc.merge_patch(overrides);
    }
    RunConfig cfg;
    try {
        if (doc.contains("paths")) {
            for (const auto& [key, value] : doc.at("paths").items()) {
                if (!known_paths().count(key)) throw Error(ErrorKind::InvalidConfig, "unknown path key '" + key + "'");
                cfg.paths[key] = value.get<std::string>();
            }
        }
        if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("fogsim")) {
            const auto& f = doc.at("fogsim");
            if (f.contains("strategy")) cfg.strategy = f.at("strategy").get<std::string>();
            if (f.contains("compare")) cfg.compare = f.at("compare").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("config: ") + e.what());
    }
    cfg.settings.apply_json(doc);
    cfg.settings.validate();
    cfg.merged = doc;
    return cfg;
}

nlohmann::ordered_json RunConfig::to_json() const {
    auto doc = settings.to_json();
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [k, v] : paths) p[k] = v;
    doc["paths"] = std::move(p);
    if (seed) doc["seed"] = *seed;
    doc["fogsim"] = {{"strategy", strategy}, {"compare", compare}};
    return doc;
}

bool RunConfig::has_setting(const char* section, const char* field) const {
    return merged.contains(section) && merged.at(section).is_object() && merged.at(section).contains(field);
}

std::optional<std::string> RunConfig::path(const std::string& key) const {
    auto it = paths.find(key);
    if (it == paths.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::string RunConfig::require(const std::string& key, const char* flag) const {
    if (auto p = path(key)) return *p;
    throw Error(ErrorKind::Usage, std::string("missing required path: ") + flag);
}

namespace {

struct Inputs {
    MetricCatalog catalog;
    std::vector<MetricSeries> kqi;
    std::vector<MetricSeries> kpi;
};

std::int64_t cdr_window(const MetricCatalog& catalog) {
    auto it = catalog.find(std::string(kCallAttempts));
    if (it == catalog.end())
        throw Error(ErrorKind::UnknownMetric, "CDR input needs a catalog entry for '" + std::string(kCallAttempts) + "'");
    return it->second.window_len;
}

// Reads files before parsing so that a missing input is reported as such.
Inputs load_inputs(const RunConfig& cfg, bool need_kqi, bool need_kpi) {
    std::optional<std::string> kqi_path = cfg.path("kqi");
    if (!kqi_path) kqi_path = cfg.path("in");
    if (need_kqi && !kqi_path) throw Error(ErrorKind::Usage, "missing required path: --kqi (or --in)");
    if (need_kpi && !cfg.path("kpi")) throw Error(ErrorKind::Usage, "missing required path: --kpi");

    std::string kqi_text = need_kqi ? read_file(*kqi_path) : std::string();
    std::string kpi_text = need_kpi ? read_file(*cfg.path("kpi")) : std::string();
    std::optional<std::string> cdr_text;
    if (need_kqi) {
        if (auto p = cfg.path("cdr")) cdr_text = read_file(*p);
    }
    Inputs in;
    in.catalog = load_catalog(cfg.require("catalog", "--catalog"));
    if (need_kqi) {
        in.kqi = parse_metric_csv(kqi_text, MetricKind::Kqi, in.catalog);
        if (cdr_text) {
            auto agg = aggregate_cdr(parse_cdr(std::string_view(*cdr_text)), cdr_window(in.catalog));
            in.kqi.insert(in.kqi.end(), agg.begin(), agg.end());
        }
    }
    if (need_kpi) in.kpi = parse_metric_csv(kpi_text, MetricKind::Kpi, in.catalog);
    return in;
}

void write_or_emit(const std::optional<std::string>& path, const std::string& text, RunOutput& out) {
    if (path) {
        write_file(*path, text);
        out.diagnostics.push_back("wrote " + *path);
    } else {
        out.data += text;
    }
}

RunOutput cmd_gen(const RunConfig& cfg) {
    RunOutput out;
    ScenarioSpec spec = cfg.path("spec") ? load_spec(*cfg.path("spec")) : default_scenario();
    auto seed = cfg.seed.value_or(spec.seed);
    auto dir = cfg.require("out", "--out");
    auto scn = generate(spec, seed);
    write_scenario(scn, dir);
    out.diagnostics.push_back("generated " + std::to_string(spec.n_cells) + " cells x " +
                              std::to_string(spec.window_count()) + " windows, " +
                              std::to_string(scn.truth.events.size()) + " planted anomalies, seed " +
                              std::to_string(seed) + " -> " + dir);
    return out;
}

RunOutput cmd_train(const RunConfig& cfg) {
    RunOutput out;
    auto in = load_inputs(cfg, true, cfg.path("kpi").has_value());
    auto dest = cfg.path("out") ? cfg.path("out") : cfg.path("model");
    if (!dest) throw Error(ErrorKind::Usage, "missing required path: --out (or --model)");
    const auto& st = cfg.settings;
    auto pk = prepare_series(in.kqi, st);
    auto pp = prepare_series(in.kpi, st);
    pk.report.absorb(pp.report);
    auto train = std::move(pk.train);
    train.insert(train.end(), std::make_move_iterator(pp.train.begin()), std::make_move_iterator(pp.train.end()));
    auto model = fit_baseline(train, st.detector, st.use_catalog_bounds ? bounds_from_catalog(in.catalog) : BoundsTable{});
    save_model(model, *dest);
    out.diagnostics.push_back("cleaning removed " + std::to_string(pk.report.missing_removed) + " missing and " +
                              std::to_string(pk.report.extremes_removed) + " extreme points");
    if (auto p = cfg.path("clean_report")) write_file(*p, pk.report.to_json().dump(2) + "\n");
    out.diagnostics.push_back("trained " + std::to_string(model.entries.size()) + " baseline keys -> " + *dest);
    return out;
}

RunOutput cmd_detect(const RunConfig& cfg) {
    RunOutput out;
    auto dest = cfg.path("out") ? cfg.path("out") : cfg.path("events");
    if (!dest) throw Error(ErrorKind::Usage, "missing required path: --out (or --events)");
    auto model_path = cfg.require("model", "--model");
    auto in = load_inputs(cfg, true, false);
    auto model = load_model(model_path);
    PipelineSettings st = cfg.settings;
    if (!cfg.has_setting("detector", "tau")) st.detector.tau = model.config.tau;
    std::vector<MetricSeries> test;
    for (const auto& s : in.kqi) test.push_back(chrono_split(s, st.train_fraction).test);
    auto events = detect_events(model, test, st);
    write_file(*dest, serialize_events(events));
    out.diagnostics.push_back("detected " + std::to_string(events.size()) + " events -> " + *dest);
    return out;
}

std::vector<AnomalyEvent> read_events(const RunConfig& cfg) {
    return parse_events(read_file(cfg.require("events", "--events")));
}

RunOutput cmd_mine(const RunConfig& cfg) {
    RunOutput out;
    auto dest = cfg.path("out") ? cfg.path("out") : cfg.path("db");
    if (!dest) throw Error(ErrorKind::Usage, "missing required path: --out (or --db)");
    auto model = load_model(cfg.require("model", "--model"));
    auto events = read_events(cfg);
    auto in = load_inputs(cfg, false, true);
    std::vector<std::string> warnings;
    auto tx = build_transactions(events, in.kpi, model, cfg.settings.z_symptom, &warnings);
    auto rules = mine_rare_rules(tx, cfg.settings.mine);

    FingerprintDb prior;
    if (auto p = cfg.path("db_in")) prior = load_db(*p);
    LabelMap labels;
    if (auto p = cfg.path("labels")) labels = load_labels(*p);
    else if (auto t = cfg.path("truth")) labels = load_labels(*t);
    std::int64_t built_at = prior.built_at;
    for (const auto& e : events) built_at = std::max(built_at, e.end_window);
    auto db = update_db(prior, rules, labels, built_at, tx.size());
    save_db(db, *dest);
    for (auto& w : warnings) out.diagnostics.push_back("warning: " + w);
    out.diagnostics.push_back("mined " + std::to_string(rules.size()) + " rules from " + std::to_string(tx.size()) +
                              " transactions; db holds " + std::to_string(db.rules.size()) + " -> " + *dest);
    return out;
}

RunOutput cmd_diagnose(const RunConfig& cfg) {
    RunOutput out;
    auto dest = cfg.path("out") ? cfg.path("out") : cfg.path("diagnoses");
    auto db = load_db(cfg.require("db", "--db"));
    auto model = load_model(cfg.require("model", "--model"));
    auto events = read_events(cfg);
    auto in = load_inputs(cfg, false, true);
    std::vector<std::string> warnings;
    SymptomExtractor extractor(in.kpi, model, cfg.settings.z_symptom);
    auto rows = diagnose_events(db, events, extractor, cfg.settings, &warnings);
    write_or_emit(dest, serialize_diagnoses(rows), out);
    auto matched = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.diagnosis.matched; });
    for (auto& w : warnings) out.diagnostics.push_back("warning: " + w);
    out.diagnostics.push_back("diagnosed " + std::to_string(rows.size()) + " events, " + std::to_string(matched) +
                              " matched a known fingerprint");
    return out;
}

RunOutput cmd_eval(const RunConfig& cfg) {
    RunOutput out;
    auto events = read_events(cfg);
    std::vector<DiagnosedEvent> rows;
    if (auto p = cfg.path("diagnoses")) rows = parse_diagnoses(read_file(*p));
    auto truth = truth_from_json(parse_json_file(cfg.require("truth", "--truth"), ErrorKind::InvalidConfig));
    auto report = evaluate(events, rows, truth);
    write_or_emit(cfg.path("out"), report.to_json().dump(2) + "\n", out);
    return out;
}

FogScenario load_fog_scenario(const RunConfig& cfg, std::vector<std::string>& cells) {
    FogScenario scn;
    PipelineSettings st;
    if (auto dir = cfg.path("data")) {
        std::filesystem::path d(*dir);
        scn.catalog = load_catalog(d / "catalog.json");
        scn.kqi = load_metric_csv(d / "kqi.csv", MetricKind::Kqi, scn.catalog);
        if (std::filesystem::exists(d / "kpi.csv")) scn.kpi = load_metric_csv(d / "kpi.csv", MetricKind::Kpi, scn.catalog);
        if (std::filesystem::exists(d / "cdr.csv")) scn.cdr = load_cdr(d / "cdr.csv");
        if (std::filesystem::exists(d / "truth.json"))
            scn.labels = labels_from_json(parse_json_file((d / "truth.json").string(), ErrorKind::InvalidConfig));
        if (std::filesystem::exists(d / "spec.json")) {
            auto spec = load_spec(d / "spec.json");
            scn.sizes = RecordSizes::from_json(spec.record_sizes);
            st.apply_json(spec.pipeline);
            scn.built_at = spec.end_time();
        }
        std::set<std::string> ids;
        for (const auto& s : scn.kqi) ids.insert(s.cell_id);
        for (const auto& s : scn.kpi) ids.insert(s.cell_id);
        for (const auto& r : scn.cdr) ids.insert(r.cell_id);
        cells.assign(ids.begin(), ids.end());
    } else {
        ScenarioSpec spec = cfg.path("spec") ? load_spec(*cfg.path("spec")) : default_scenario();
        auto g = generate(spec, cfg.seed.value_or(spec.seed));
        scn = fog_scenario(g);
        st = scn.settings;
        cells = g.spec.cell_ids();
    }
    st.apply_json(cfg.merged);
    st.validate();
    scn.settings = st;
    return scn;
}

RunOutput cmd_fogsim(const RunConfig& cfg) {
    RunOutput out;
    const auto strategy = parse_strategy(cfg.strategy);
    std::vector<std::string> cells;
    auto scn = load_fog_scenario(cfg, cells);
    FogTopology topo = cfg.path("topology")
                           ? build_topology(parse_json_file(*cfg.path("topology"), ErrorKind::InvalidTopology))
                           : default_topology(cells);
    if (!cfg.compare) {
        auto res = simulate(topo, strategy, scn);
        write_or_emit(cfg.path("out"), res.cost.to_json().dump(2) + "\n", out);
        return out;
    }
    std::vector<SimulationResult> runs;
    for (auto s : {DeploymentStrategy::Centralized, DeploymentStrategy::EdgeInference, DeploymentStrategy::Fog})
        runs.push_back(simulate(topo, s, scn));
    std::vector<CostReport> reports;
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& r : runs) {
        reports.push_back(r.cost);
        all.push_back(r.cost.to_json());
    }
    out.data = comparison_table(reports);
    auto yes = [](bool b) { return b ? std::string("identical") : std::string("DIFFERENT"); };
    out.data += "model FOG vs CENTRALIZED: " + yes(compare_models(runs[2].model, runs[0].model)) + "\n";
    out.data += "db    FOG vs CENTRALIZED: " + yes(compare_dbs(runs[2].db, runs[0].db)) + "\n";
    if (auto p = cfg.path("out")) {
        write_file(*p, all.dump(2) + "\n");
        out.diagnostics.push_back("wrote " + *p);
    }
    return out;
}

RunOutput cmd_report(const RunConfig& cfg) {
    RunOutput out;
    out.data = summarize_artifact(read_file(cfg.require("in", "--in")));
    return out;
}

// --- report ----------------------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string join_items(const nlohmann::json& arr) {
    std::string s;
    for (const auto& i : arr) s += (s.empty() ? "" : ", ") + i.get<std::string>();
    return "{" + s + "}";
}

void summarize_model(const nlohmann::json& d, std::ostringstream& o) {
    std::set<std::string> cells, metrics;
    std::size_t thin = 0;
    const auto min_samples = d.at("config").at("min_samples").get<std::uint64_t>();
    for (const auto& k : d.at("keys")) {
        cells.insert(k.at("cell_id").get<std::string>());
        metrics.insert(k.at("metric_name").get<std::string>());
        if (k.at("sample_count").get<std::uint64_t>() < min_samples) ++thin;
    }
    const auto& c = d.at("config");
    o << "baseline model: " << d.at("keys").size() << " keys over " << cells.size() << " cells and " << metrics.size()
      << " metrics\n";
    o << "  bins=" << c.at("bin_count") << " tau=" << c.at("tau") << " min_samples=" << min_samples << "\n";
    o << "  keys below min_samples: " << thin << "\n";
}

void summarize_db(const nlohmann::json& d, std::ostringstream& o) {
    o << "fingerprint db: " << d.at("rules").size() << " rules, " << d.at("transaction_total") << " transactions, built_at "
      << d.at("built_at") << "\n";
    for (const auto& r : d.at("rules")) {
        o << "  " << join_items(r.at("antecedent")) << " => " << r.at("consequent").get<std::string>()
          << "  conf=" << fmt(r.at("confidence").get<double>()) << " lift=" << fmt(r.at("lift").get<double>())
          << " support=" << r.at("support_count") << "/" << r.at("antecedent_count");
        if (!r.at("cause_label").is_null()) o << "  [" << r.at("cause_label").get<std::string>() << "]";
        o << "\n";
    }
}

void summarize_cost(const nlohmann::json& d, std::ostringstream& o) {
    o << d.at("strategy").get<std::string>() << ": " << d.at("total_bytes") << " bytes (" << d.at("bytes_up") << " up, "
      << d.at("bytes_down") << " down), " << d.at("events") << " events, mean latency "
      << fmt(d.at("mean_latency_s").get<double>()) << " s, max " << fmt(d.at("max_latency_s").get<double>()) << " s\n";
    for (const auto& [phase, bytes] : d.at("phase_bytes").items()) o << "  " << phase << ": " << bytes << " bytes\n";
}

void summarize_jsonl(const std::vector<nlohmann::json>& rows, std::ostringstream& o) {
    if (!rows.empty() && rows.front().contains("diagnosis")) {
        std::map<std::string, std::size_t> causes;
        std::size_t matched = 0;
        for (const auto& r : rows) {
            const auto& d = r.at("diagnosis");
            if (d.at("matched").get<bool>()) {
                ++matched;
                causes[d.at("ranked").at(0).at("cause_label").get<std::string>()]++;
            }
        }
        o << "diagnoses: " << rows.size() << " events, " << matched << " matched, " << rows.size() - matched
          << " unknown\n";
        for (const auto& [c, n] : causes) o << "  " << c << ": " << n << "\n";
        return;
    }
    std::map<std::string, std::size_t> by_metric;
    std::set<std::string> cells;
    for (const auto& r : rows) {
        const auto& e = r.contains("event") ? r.at("event") : r;
        by_metric[e.at("metric_name").get<std::string>()]++;
        cells.insert(e.at("cell_id").get<std::string>());
    }
    o << "events: " << rows.size() << " across " << cells.size() << " cells\n";
    for (const auto& [m, n] : by_metric) o << "  " << m << ": " << n << "\n";
}

}  // namespace

std::string summarize_artifact(const std::string& text) {
    std::ostringstream o;
    try {
        auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded()) {
            std::vector<nlohmann::json> rows;
            std::istringstream in(text);
            std::string line;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                auto row = nlohmann::json::parse(line, nullptr, false);
                if (row.is_discarded() || !row.is_object())
                    throw Error(ErrorKind::Usage, "input is neither JSON nor JSON Lines");
                rows.push_back(std::move(row));
            }
            summarize_jsonl(rows, o);
            return o.str();
        }
        if (doc.is_array() && !doc.empty() && doc.front().value("kind", "") == "cost_report") {
            for (const auto& r : doc) summarize_cost(r, o);
            return o.str();
        }
        if (!doc.is_object()) throw Error(ErrorKind::Usage, "unrecognized artifact");
        if (doc.contains("event") || doc.contains("window_start") || doc.contains("start_window")) {
            summarize_jsonl({doc}, o);
            return o.str();
        }
        const std::string kind = doc.value("kind", "");
        if (kind == "baseline_model") {
            summarize_model(doc, o);
        } else if (kind == "fingerprint_db") {
            summarize_db(doc, o);
        } else if (kind == "cost_report") {
            summarize_cost(doc, o);
        } else if (kind == "eval_report") {
            o << "evaluation: precision " << fmt(doc.at("precision").get<double>()) << " (" << doc.at("matched_detected")
              << "/" << doc.at("detected") << "), recall " << fmt(doc.at("recall").get<double>()) << " ("
              << doc.at("matched_planted") << "/" << doc.at("planted") << "), RCA top-1 "
              << fmt(doc.at("rca_top1_accuracy").get<double>()) << " (" << doc.at("rca_correct") << "/"
              << doc.at("rca_evaluated") << ")\n";
        } else if (kind == "clean_report") {
            o << "cleaning: " << doc.at("missing_removed") << " missing and " << doc.at("extremes_removed")
              << " extreme points removed over " << doc.at("detail").size() << " series\n";
        } else if (kind == "ground_truth") {
            o << "ground truth: " << doc.at("planted_events").size() << " planted events, "
              << doc.at("planted_rules").size() << " planted rules, test span from " << doc.at("test_start") << "\n";
            for (const auto& r : doc.at("planted_rules"))
                o << "  " << r.at("cause_label").get<std::string>() << ": " << join_items(r.at("antecedent")) << " => "
                  << r.at("consequent").get<std::string>() << "\n";
        } else if (kind == "scenario_spec") {
            o << "scenario: " << doc.at("n_cells") << " cells, " << doc.at("days") << " days of " << doc.at("window_len")
              << " s windows, " << doc.at("metrics").size() << " metrics, " << doc.at("anomalies").size()
              << " planted anomalies, seed " << doc.at("seed") << "\n";
        } else if (doc.contains("nodes")) {
            auto t = build_topology(doc);
            o << "topology: " << t.ids_of(Tier::Fog).size() << " fog nodes, " << t.ids_of(Tier::Edge).size()
              << " edge nodes, " << t.cell_to_edge.size() << " cells\n";
        } else {
            auto cat = catalog_from_json(doc);
            o << "metric catalog: " << cat.size() << " metrics\n";
            for (const auto& [name, info] : cat)
                o << "  " << name << " " << to_string(info.kind) << " " << to_string(info.polarity) << " "
                  << info.window_len << "s\n";
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Usage, std::string("unrecognized artifact: ") + e.what());
    }
    return o.str();
}

RunOutput run_command(const std::string& command, const RunConfig& cfg) {
    if (command == "gen") return cmd_gen(cfg);
    if (command == "train") return cmd_train(cfg);
    if (command == "detect") return cmd_detect(cfg);
    if (command == "mine") return cmd_mine(cfg);
    if (command == "diagnose") return cmd_diagnose(cfg);
    if (command == "fogsim") return cmd_fogsim(cfg);
    if (command == "eval") return cmd_eval(cfg);
    if (command == "report") return cmd_report(cfg);
    throw Error(ErrorKind::Usage, "unknown command '" + command + "'");
}

}  // namespace fogdna
