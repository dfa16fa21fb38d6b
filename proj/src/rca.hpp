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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fingerprint.hpp"
#include "json.hpp"
#include "postfilter.hpp"

namespace fogdna {

struct SymptomSet {
    std::vector<SymptomItem> items;
    std::string consequent;
    std::optional<AnomalyEvent> event;
};

struct RankedCause {
    std::string cause_label;  // "UNLABELED" when the fingerprint carries none
    double distance = 0.0;
    Fingerprint fingerprint;
};

struct Diagnosis {
    std::vector<RankedCause> ranked;
    bool matched = false;
    double match_threshold = 0.5;
};

inline constexpr std::string_view kUnlabeled = "UNLABELED";

// 1 - |a n b| / |a u b|, with 0 for two empty sets.
double jaccard_distance(std::span<const SymptomItem> a, std::span<const SymptomItem> b);

// k nearest fingerprints for the same consequent KQI.
Diagnosis diagnose(const FingerprintDb& db, const SymptomSet& symptoms, std::size_t k, double match_threshold);

nlohmann::ordered_json diagnosis_to_json(const Diagnosis& d);
Diagnosis diagnosis_from_json(const nlohmann::json& doc);

struct DiagnosedEvent {
    AnomalyEvent event;
    std::vector<SymptomItem> symptoms;
    Diagnosis diagnosis;
};

std::string serialize_diagnoses(std::span<const DiagnosedEvent> rows);
std::vector<DiagnosedEvent> parse_diagnoses(std::string_view jsonl);

}  // namespace fogdna
