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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "baseline.hpp"
#include "ingest.hpp"
#include "json.hpp"
#include "postfilter.hpp"

namespace fogdna {

enum class SymptomState { High, Low };

struct SymptomItem {
    std::string metric_name;
    SymptomState state = SymptomState::High;

    // Canonical "metric=STATE" form; ordering follows this string.
    std::string key() const;
    static SymptomItem parse(std::string_view text);

    bool operator==(const SymptomItem&) const = default;
    std::strong_ordering operator<=>(const SymptomItem& other) const { return key() <=> other.key(); }
};

// Sorts and removes duplicates.
void canonicalize(std::vector<SymptomItem>& items);

struct Transaction {
    std::vector<SymptomItem> items;
    std::string consequent;
    CellWindowKey key;
};

struct Fingerprint {
    std::vector<SymptomItem> antecedent;
    std::string consequent;
    double support = 0.0;
    std::uint64_t support_count = 0;     // transactions holding antecedent and consequent
    std::uint64_t antecedent_count = 0;  // transactions holding antecedent
    double confidence = 0.0;
    double lift = 0.0;
    std::optional<std::string> cause_label;

    bool operator==(const Fingerprint&) const = default;
};

// Confidence desc, support_count desc, antecedent lexicographic, consequent.
bool rule_order(const Fingerprint& a, const Fingerprint& b);

inline constexpr int kFingerprintSchemaVersion = 1;

struct FingerprintDb {
    std::vector<Fingerprint> rules;
    std::uint64_t transaction_total = 0;
    std::int64_t built_at = 0;
    int schema_version = kFingerprintSchemaVersion;

    bool operator==(const FingerprintDb&) const = default;
};

struct MineConfig {
    std::uint64_t s_min_count = 3;
    double s_max_fraction = 0.10;
    double c_min = 0.8;
    double lift_min = 1.5;
    std::size_t max_antecedent = 4;

    void validate() const;
};

// Largest support_count still considered rare: ceil(fraction * total).
std::uint64_t rarity_ceiling(double s_max_fraction, std::uint64_t total);

// Scores each KPI of a cell at one window against the baseline.
class SymptomExtractor {
public:
    SymptomExtractor(std::span<const MetricSeries> kpi_series, const BaselineModel& model, double z_symptom);

    // nullopt when the cell has no KPI value at that window.
    std::optional<std::vector<SymptomItem>> extract(const std::string& cell_id, std::int64_t window,
                                                    std::vector<std::string>* warnings = nullptr) const;

private:
    std::map<std::string, std::vector<const MetricSeries*>> by_cell_;
    const BaselineModel& model_;
    double z_symptom_;
};

std::vector<Transaction> build_transactions(std::span<const AnomalyEvent> events,
                                            std::span<const MetricSeries> kpi_series,
                                            const BaselineModel& model, double z_symptom,
                                            std::vector<std::string>* warnings = nullptr);

// FP-Growth over one prefix tree per consequent, keeping itemsets whose count
// lies in the band [s_min_count, rarity_ceiling].
std::vector<Fingerprint> mine_rare_rules(std::span<const Transaction> transactions, const MineConfig& cfg);

// Additive itemset counts (every subset up to max_len of every transaction),
// the exchange format for mining on partitioned data.
class ItemsetCounts {
public:
    explicit ItemsetCounts(std::size_t max_len = 4) : max_len_(max_len) {}

    void add(const Transaction& t);
    void merge(const ItemsetCounts& other);

    std::size_t max_len() const { return max_len_; }
    std::uint64_t transaction_total() const { return transaction_total_; }
    const std::map<std::string, std::uint64_t>& consequent_totals() const { return consequent_totals_; }
    const std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>>& table() const {
        return table_;
    }
    std::size_t entry_count() const;

    bool operator==(const ItemsetCounts&) const = default;

private:
    std::size_t max_len_;
    std::uint64_t transaction_total_ = 0;
    std::map<std::string, std::uint64_t> consequent_totals_;
    std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>> table_;
};

std::vector<Fingerprint> mine_from_counts(const ItemsetCounts& counts, const MineConfig& cfg);

using RuleKey = std::pair<std::vector<SymptomItem>, std::string>;
using LabelMap = std::map<RuleKey, std::string>;

FingerprintDb update_db(const FingerprintDb& db, std::span<const Fingerprint> new_rules,
                        const LabelMap& labels, std::int64_t built_at, std::uint64_t transaction_total);

nlohmann::ordered_json db_to_json(const FingerprintDb& db);
FingerprintDb db_from_json(const nlohmann::json& doc);
std::string serialize_db(const FingerprintDb& db);
void save_db(const FingerprintDb& db, const std::filesystem::path& path);
FingerprintDb load_db(const std::filesystem::path& path);

nlohmann::ordered_json rule_to_json(const Fingerprint& f);
// Field extraction only; db_from_json adds invariant checks.
Fingerprint rule_from_json(const nlohmann::json& doc);
nlohmann::ordered_json items_to_json(std::span<const SymptomItem> items);
std::vector<SymptomItem> items_from_json(const nlohmann::json& arr);

// Reads {"labels": [...]} or a ground-truth document with "planted_rules".
LabelMap labels_from_json(const nlohmann::json& doc);
LabelMap load_labels(const std::filesystem::path& path);

}  // namespace fogdna
