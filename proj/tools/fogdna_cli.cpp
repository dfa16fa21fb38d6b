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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <list>
#include <tuple>
#include <utility>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fogdna/fogdna.h"
#include "json.hpp"

namespace {

class Overrides {
public:
    Overrides(const Overrides&) = delete;
    Overrides& operator=(const Overrides&) = delete;

    explicit Overrides(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_, "JSON config file; flags override it")->check(CLI::ExistingFile);
    }

    Overrides& path(const std::string& flag, const std::string& key, const std::string& help) {
        app_->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { doc_["paths"][key] = v; }, help);
        return *this;
    }

    template <typename T>
    Overrides& setting(const std::string& flag, const char* section, const char* field, const std::string& help) {
        app_->add_option_function<T>(
            flag, [this, section, field](const T& v) { doc_[section][field] = v; }, help);
        return *this;
    }

    Overrides& clean() {
        setting<double>("--iqr-k", "clean", "iqr_multiplier", "Tukey fence multiplier (default 6)");
        setting<std::size_t>("--min-points", "clean", "min_points", "minimum points per cleaned series (default 24)");
        return *this;
    }
    Overrides& split() {
        return setting<double>("--train-fraction", "split", "train_fraction", "chronological training share (default 0.7)");
    }
    Overrides& detector() {
        setting<std::size_t>("--bins", "detector", "bin_count", "histogram bins per key (default 128)");
        setting<double>("--tau", "detector", "tau", "robust z threshold (default 5)");
        setting<std::uint64_t>("--min-samples", "detector", "min_samples", "samples a key needs to flag (default 20)");
        app_->add_flag_function(
            "--catalog-bounds", [this](std::int64_t) { doc_["detector"]["use_catalog_bounds"] = true; },
            "fix sketch bounds from the catalog ranges");
        return *this;
    }
    Overrides& filter() {
        setting<std::size_t>("--persist-m", "filter", "persistence_m", "flags needed in a run (default 2)");
        setting<std::size_t>("--persist-n", "filter", "persistence_n", "run length in windows (default 3)");
        setting<std::size_t>("--merge-gap", "filter", "merge_gap", "max windows between merged events (default 2)");
        setting<double>("--min-peak", "filter", "min_peak_score", "minimum event peak score (default 6)");
        return *this;
    }
    Overrides& mine() {
        setting<std::uint64_t>("--s-min", "mine", "s_min_count", "minimum rule support count (default 3)");
        setting<double>("--s-max", "mine", "s_max_fraction", "rarity ceiling as a fraction (default 0.10)");
        setting<double>("--c-min", "mine", "c_min", "minimum confidence (default 0.8)");
        setting<double>("--lift-min", "mine", "lift_min", "minimum lift (default 1.5)");
        setting<std::size_t>("--max-antecedent", "mine", "max_antecedent", "antecedent size limit (default 4)");
        return z_symptom();
    }
    Overrides& z_symptom() {
        return setting<double>("--z-symptom", "mine", "z_symptom", "KPI z-score marking a symptom (default 3)");
    }
    Overrides& rca() {
        setting<std::size_t>("--k", "rca", "k", "neighbours reported (default 3)");
        setting<double>("--threshold", "rca", "match_threshold", "max Jaccard distance for a match (default 0.5)");
        return *this;
    }
    Overrides& seed() {
        app_->add_option_function<std::uint64_t>(
            "--seed", [this](const std::uint64_t& v) { doc_["seed"] = v; }, "random seed");
        return *this;
    }

    Overrides& deployment() {
        app_->add_option_function<std::string>(
            "--strategy", [this](const std::string& v) { doc_["fogsim"]["strategy"] = v; },
            "CENTRALIZED, EDGE_INFERENCE or FOG (default FOG)");
        app_->add_flag_function(
            "--compare", [this](std::int64_t) { doc_["fogsim"]["compare"] = true; },
            "run all three strategies and print a comparison table");
        return *this;
    }

    const nlohmann::json& doc() const { return doc_; }
    const std::string& config() const { return config_; }

private:
    CLI::App* app_;
    std::string config_;
    nlohmann::json doc_ = nlohmann::json::object();
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fogdna: anomaly detection and root-cause fingerprinting for cellular KQI/KPI data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fogdna_version());

    // Overrides callbacks capture their own address, so the container must not relocate.
    std::list<std::pair<CLI::App*, Overrides>> subs;
    auto sub = [&](const char* name, const char* help) -> Overrides& {
        auto* s = app.add_subcommand(name, help);
        subs.emplace_back(std::piecewise_construct, std::forward_as_tuple(s), std::forward_as_tuple(s));
        return subs.back().second;
    };

    sub("gen", "generate a synthetic scenario directory")
        .path("--spec", "spec", "scenario spec JSON (default built-in scenario)")
        .path("--out", "out", "output directory")
        .seed();
    sub("train", "clean, split and fit baselines")
        .path("--in,--kqi", "kqi", "KQI CSV")
        .path("--kpi", "kpi", "KPI CSV")
        .path("--cdr", "cdr", "CDR CSV, aggregated into cell KQIs")
        .path("--catalog", "catalog", "metric catalog JSON")
        .path("--out,--model", "out", "model JSON to write")
        .path("--clean-report", "clean_report", "cleaning report JSON to write")
        .clean()
        .split()
        .detector();
    sub("detect", "score the test span and write anomaly events")
        .path("--in,--kqi", "kqi", "KQI CSV")
        .path("--cdr", "cdr", "CDR CSV, aggregated into cell KQIs")
        .path("--catalog", "catalog", "metric catalog JSON")
        .path("--model", "model", "model JSON")
        .path("--out,--events", "out", "events JSON Lines to write")
        .split()
        .setting<double>("--tau", "detector", "tau", "robust z threshold (default: the model's)")
        .filter();
    sub("mine", "build symptom transactions and mine rare fingerprints")
        .path("--model", "model", "model JSON")
        .path("--events", "events", "events JSON Lines")
        .path("--kpi", "kpi", "KPI CSV")
        .path("--catalog", "catalog", "metric catalog JSON")
        .path("--out,--db", "out", "fingerprint db JSON to write")
        .path("--db-in", "db_in", "existing db to update")
        .path("--labels", "labels", "cause labels JSON (labels or planted_rules)")
        .path("--truth", "truth", "ground truth JSON used as labels")
        .mine();
    sub("diagnose", "match event symptoms against the fingerprint db")
        .path("--db", "db", "fingerprint db JSON")
        .path("--model", "model", "model JSON")
        .path("--events", "events", "events JSON Lines")
        .path("--kpi", "kpi", "KPI CSV")
        .path("--catalog", "catalog", "metric catalog JSON")
        .path("--out,--diagnoses", "out", "diagnoses JSON Lines to write (default stdout)")
        .z_symptom()
        .rca();
    sub("fogsim", "simulate centralized, edge-inference and fog deployments")
        .path("--spec", "spec", "scenario spec JSON (default built-in scenario)")
        .path("--data", "data", "scenario directory written by gen")
        .path("--topology", "topology", "topology JSON (default 1 cloud, 5 fog, 10 edge)")
        .path("--out", "out", "cost report JSON to write (default stdout)")
        .seed()
        .deployment()
        .clean()
        .split()
        .detector()
        .filter()
        .mine()
        .rca();
    sub("eval", "score detections and diagnoses against ground truth")
        .path("--events", "events", "events JSON Lines")
        .path("--diagnoses", "diagnoses", "diagnoses JSON Lines")
        .path("--truth", "truth", "ground truth JSON")
        .path("--out", "out", "report JSON to write (default stdout)");
    sub("report", "print a readable summary of any artifact").path("--in", "in", "artifact file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto& [s, ov] : subs) {
        if (!s->parsed()) continue;
        fogdna_context* ctx = fogdna_context_new();
        if (!ctx) {
            std::fputs("fogdna: out of memory\n", stderr);
            return 1;
        }
        auto overrides = ov.doc().dump();
        fogdna_status st = fogdna_run(ctx, s->get_name().c_str(), ov.config().empty() ? nullptr : ov.config().c_str(),
                                      overrides.c_str());
        std::fputs(fogdna_last_diagnostics(ctx), stderr);
        std::fputs(fogdna_last_output(ctx), stdout);
        if (st != FOGDNA_OK)
            std::fprintf(stderr, "fogdna %s: %s\n", s->get_name().c_str(), fogdna_last_error(ctx));
        fogdna_context_free(ctx);
        switch (st) {
            case FOGDNA_OK: return 0;
            case FOGDNA_ERR_USAGE:
            case FOGDNA_ERR_IO: return 2;
            default: return 1;
        }
    }
    return 2;
}
