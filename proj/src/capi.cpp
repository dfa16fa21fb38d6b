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

#include "fogdna/fogdna.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "commands.hpp"
#include "common.hpp"
#include "fingerprint.hpp"
#include "rca.hpp"

struct fogdna_context {
    std::string error;
    std::string error_kind;
    std::string output;
    std::string diagnostics;
};

struct fogdna_model {
    fogdna::BaselineModel model;
};

struct fogdna_fingerprint_db {
    fogdna::FingerprintDb db;
};

namespace {

fogdna_status status_of(fogdna::ErrorKind kind) {
    using fogdna::ErrorKind;
    if (kind == ErrorKind::Io) return FOGDNA_ERR_IO;
    if (!fogdna::is_domain_error(kind)) return FOGDNA_ERR_USAGE;
    return FOGDNA_ERR_DOMAIN;
}

void reset(fogdna_context* ctx) {
    ctx->error.clear();
    ctx->error_kind.clear();
    ctx->output.clear();
    ctx->diagnostics.clear();
}

template <typename F>
fogdna_status guarded(fogdna_context* ctx, F&& body) {
    if (!ctx) return FOGDNA_ERR_USAGE;
    reset(ctx);
    try {
        body();
        return FOGDNA_OK;
    } catch (const fogdna::Error& e) {
        ctx->error = e.what();
        ctx->error_kind = std::string(fogdna::to_string(e.kind()));
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        ctx->error = "out of memory";
        ctx->error_kind = "Internal";
    } catch (const std::exception& e) {
        ctx->error = e.what();
        ctx->error_kind = "Internal";
    }
    return FOGDNA_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
    if (!p) throw fogdna::Error(fogdna::ErrorKind::Usage, std::string(what) + " must not be NULL");
}

nlohmann::json parse_arg(const char* text, const char* what) {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw fogdna::Error(fogdna::ErrorKind::Usage, std::string(what) + " is not valid JSON");
    return doc;
}

std::vector<fogdna::SymptomItem> items_arg(const char* text, const char* what) {
    need(text, what);
    try {
        auto items = fogdna::items_from_json(parse_arg(text, what));
        fogdna::canonicalize(items);
        return items;
    } catch (const fogdna::Error& e) {
        throw fogdna::Error(fogdna::ErrorKind::Usage, std::string(what) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw fogdna::Error(fogdna::ErrorKind::Usage, std::string(what) + ": " + e.what());
    }
}

}  // namespace

extern "C" {

const char* fogdna_version(void) { return "0.1.0"; }

fogdna_context* fogdna_context_new(void) { return new (std::nothrow) fogdna_context(); }

void fogdna_context_free(fogdna_context* ctx) { delete ctx; }

const char* fogdna_last_error(const fogdna_context* ctx) { return ctx ? ctx->error.c_str() : ""; }

const char* fogdna_last_error_kind(const fogdna_context* ctx) { return ctx ? ctx->error_kind.c_str() : ""; }

const char* fogdna_last_output(const fogdna_context* ctx) { return ctx ? ctx->output.c_str() : ""; }

const char* fogdna_last_diagnostics(const fogdna_context* ctx) { return ctx ? ctx->diagnostics.c_str() : ""; }

fogdna_status fogdna_run(fogdna_context* ctx, const char* command, const char* config_path,
                         const char* overrides_json) {
    return guarded(ctx, [&] {
        need(command, "command");
        nlohmann::json file_doc;
        if (config_path) {
            file_doc = nlohmann::json::parse(fogdna::read_file(config_path), nullptr, false);
            if (file_doc.is_discarded())
                throw fogdna::Error(fogdna::ErrorKind::InvalidConfig, std::string("config '") + config_path +
                                                                          "' is not valid JSON");
        }
        nlohmann::json overrides;
        if (overrides_json) overrides = parse_arg(overrides_json, "overrides");
        auto cfg = fogdna::RunConfig::from_json(file_doc, overrides);
        auto out = fogdna::run_command(command, cfg);
        ctx->output = std::move(out.data);
        for (const auto& line : out.diagnostics) ctx->diagnostics += line + "\n";
    });
}

fogdna_status fogdna_model_load(fogdna_context* ctx, const char* path, fogdna_model** out) {
    return guarded(ctx, [&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new fogdna_model{fogdna::load_model(path)};
    });
}

fogdna_status fogdna_model_save(fogdna_context* ctx, const fogdna_model* model, const char* path) {
    return guarded(ctx, [&] {
        need(model, "model");
        need(path, "path");
        fogdna::save_model(model->model, path);
    });
}

void fogdna_model_free(fogdna_model* model) { delete model; }

size_t fogdna_model_key_count(const fogdna_model* model) { return model ? model->model.entries.size() : 0; }

int fogdna_model_equal(const fogdna_model* a, const fogdna_model* b) {
    if (!a || !b) return a == b;
    return a->model == b->model ? 1 : 0;
}

fogdna_status fogdna_model_merge(fogdna_context* ctx, const fogdna_model* const* models, size_t count,
                                 fogdna_model** out) {
    return guarded(ctx, [&] {
        need(out, "out");
        *out = nullptr;
        if (count) need(models, "models");
        std::vector<fogdna::BaselineModel> parts;
        for (size_t i = 0; i < count; ++i) {
            need(models[i], "models[i]");
            parts.push_back(models[i]->model);
        }
        *out = new fogdna_model{fogdna::merge_baselines(parts)};
    });
}

fogdna_status fogdna_model_score(fogdna_context* ctx, const fogdna_model* model, const char* cell_id,
                                 const char* metric, int hour, double value, double* score, int* direction,
                                 int* flagged) {
    return guarded(ctx, [&] {
        need(model, "model");
        need(cell_id, "cell_id");
        need(metric, "metric");
        auto s = fogdna::robust_score(model->model, {cell_id, metric, hour}, value);
        if (score) *score = s.score;
        if (direction) *direction = s.direction == fogdna::Direction::Up ? 1 : s.direction == fogdna::Direction::Down ? -1 : 0;
        if (flagged) *flagged = s.score >= model->model.config.tau && s.degrading && s.sufficient_data;
    });
}

fogdna_status fogdna_db_load(fogdna_context* ctx, const char* path, fogdna_fingerprint_db** out) {
    return guarded(ctx, [&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new fogdna_fingerprint_db{fogdna::load_db(path)};
    });
}

void fogdna_db_free(fogdna_fingerprint_db* db) { delete db; }

size_t fogdna_db_rule_count(const fogdna_fingerprint_db* db) { return db ? db->db.rules.size() : 0; }

fogdna_status fogdna_db_diagnose(fogdna_context* ctx, const fogdna_fingerprint_db* db, const char* symptoms_json,
                                 const char* consequent, size_t k, double match_threshold) {
    return guarded(ctx, [&] {
        need(db, "db");
        need(consequent, "consequent");
        fogdna::SymptomSet s{items_arg(symptoms_json, "symptoms"), consequent, std::nullopt};
        auto d = fogdna::diagnose(db->db, s, k, match_threshold);
        ctx->output = fogdna::diagnosis_to_json(d).dump() + "\n";
    });
}

fogdna_status fogdna_jaccard_distance(fogdna_context* ctx, const char* a_json, const char* b_json, double* out) {
    return guarded(ctx, [&] {
        need(out, "out");
        auto a = items_arg(a_json, "a");
        auto b = items_arg(b_json, "b");
        *out = fogdna::jaccard_distance(a, b);
    });
}

}  // extern "C"
