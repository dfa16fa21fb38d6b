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

#include "rca.hpp"

#include <algorithm>

#include "common.hpp"

namespace fogdna {

double jaccard_distance(std::span<const SymptomItem> a, std::span<const SymptomItem> b) {
    std::vector<SymptomItem> sa(a.begin(), a.end());
    std::vector<SymptomItem> sb(b.begin(), b.end());
    canonicalize(sa);
    canonicalize(sb);
    if (sa.empty() && sb.empty()) return 0.0;
    std::vector<SymptomItem> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    const double inter = static_cast<double>(common.size());
    const double uni = static_cast<double>(sa.size() + sb.size()) - inter;
    return 1.0 - inter / uni;
}

Diagnosis diagnose(const FingerprintDb& db, const SymptomSet& symptoms, std::size_t k, double match_threshold) {
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "rca.k must be >= 1");
    if (!(match_threshold >= 0.0 && match_threshold <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "rca.match_threshold must lie in [0, 1]");

    Diagnosis d;
    d.match_threshold = match_threshold;
    for (const auto& rule : db.rules) {
        if (rule.consequent != symptoms.consequent) continue;
        d.ranked.push_back({rule.cause_label.value_or(std::string(kUnlabeled)),
                            jaccard_distance(rule.antecedent, symptoms.items), rule});
    }
    // Consequent is fixed, so antecedent order completes the ranking.
    std::sort(d.ranked.begin(), d.ranked.end(), [](const RankedCause& a, const RankedCause& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return rule_order(a.fingerprint, b.fingerprint);
    });
    if (d.ranked.size() > k) d.ranked.resize(k);
    d.matched = !d.ranked.empty() && d.ranked.front().distance <= match_threshold;
    return d;
}

nlohmann::ordered_json diagnosis_to_json(const Diagnosis& d) {
    nlohmann::ordered_json doc;
    doc["matched"] = d.matched;
    doc["match_threshold"] = d.match_threshold;
    auto& ranked = doc["ranked"] = nlohmann::ordered_json::array();
    for (const auto& r : d.ranked)
        ranked.push_back({{"cause_label", r.cause_label}, {"distance", r.distance}, {"fingerprint", rule_to_json(r.fingerprint)}});
    return doc;
}

Diagnosis diagnosis_from_json(const nlohmann::json& doc) {
    Diagnosis d;
    d.matched = doc.at("matched").get<bool>();
    d.match_threshold = doc.at("match_threshold").get<double>();
    for (const auto& r : doc.at("ranked")) {
        d.ranked.push_back({r.at("cause_label").get<std::string>(), r.at("distance").get<double>(),
                            rule_from_json(r.at("fingerprint"))});
    }
    return d;
}

std::string serialize_diagnoses(std::span<const DiagnosedEvent> rows) {
    std::string out;
    for (const auto& row : rows) {
        nlohmann::ordered_json doc;
        doc["event"] = event_to_json(row.event);
        doc["symptoms"] = items_to_json(row.symptoms);
        doc["diagnosis"] = diagnosis_to_json(row.diagnosis);
        if (!row.diagnosis.matched) doc["note"] = "unknown cause; candidate for fingerprint learning";
        out += doc.dump();
        out += '\n';
    }
    return out;
}

std::vector<DiagnosedEvent> parse_diagnoses(std::string_view jsonl) {
    std::vector<DiagnosedEvent> out;
    std::size_t line_no = 0;
    for (auto line : split_fields(jsonl, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded())
            throw Error(ErrorKind::MalformedRow, "diagnosis line " + std::to_string(line_no) + " is not JSON", {line_no});
        try {
            out.push_back({event_from_json(doc.at("event")), items_from_json(doc.at("symptoms")),
                           diagnosis_from_json(doc.at("diagnosis"))});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::MalformedRow, "diagnosis line " + std::to_string(line_no) + ": " + e.what(), {line_no});
        }
    }
    return out;
}

}  // namespace fogdna
