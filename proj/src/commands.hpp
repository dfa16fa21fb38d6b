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
#include <string>
#include <vector>

#include "json.hpp"
#include "pipeline.hpp"

namespace fogdna {

// Config file merged with flag overrides. Path keys: spec, out, in, kqi, kpi,
// cdr, catalog, model, events, db, db_in, labels, diagnoses, truth, topology,
// data, clean_report.
struct RunConfig {
    std::map<std::string, std::string> paths;
    PipelineSettings settings;
    std::optional<std::uint64_t> seed;
    std::string strategy = "FOG";
    bool compare = false;
    nlohmann::json merged;  // the merged document, for settings layered later

    // Later documents win, field by field.
    static RunConfig from_json(const nlohmann::json& file_doc, const nlohmann::json& overrides);
    nlohmann::ordered_json to_json() const;

    bool has_setting(const char* section, const char* field) const;
    std::optional<std::string> path(const std::string& key) const;
    std::string require(const std::string& key, const char* flag) const;
};

struct RunOutput {
    std::string data;                      // for standard output
    std::vector<std::string> diagnostics;  // for standard error
};

inline constexpr const char* kCommands[] = {"gen", "train", "detect", "mine", "diagnose", "fogsim", "eval", "report"};

// Throws fogdna::Error; Usage for an unknown command or a missing path.
RunOutput run_command(const std::string& command, const RunConfig& cfg);

// Human-readable summary of any artifact this tool writes.
std::string summarize_artifact(const std::string& text);

}  // namespace fogdna
