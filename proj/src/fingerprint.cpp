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

#include "fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "common.hpp"

namespace fogdna {

std::string SymptomItem::key() const {
    return metric_name + (state == SymptomState::High ? "=HIGH" : "=LOW");
}

SymptomItem SymptomItem::parse(std::string_view text) {
    auto eq = text.rfind('=');
    if (eq == std::string_view::npos || eq == 0)
        throw Error(ErrorKind::CorruptDb, "bad symptom item '" + std::string(text) + "'");
    auto state = text.substr(eq + 1);
    if (state != "HIGH" && state != "LOW")
        throw Error(ErrorKind::CorruptDb, "bad symptom state in '" + std::string(text) + "'");
    return {std::string(text.substr(0, eq)), state == "HIGH" ? SymptomState::High : SymptomState::Low};
}

void canonicalize(std::vector<SymptomItem>& items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
}

bool rule_order(const Fingerprint& a, const Fingerprint& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support_count != b.support_count) return a.support_count > b.support_count;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
}

void MineConfig::validate() const {
    if (s_min_count < 1) throw Error(ErrorKind::InvalidConfig, "mine.s_min_count must be >= 1");
    if (!(s_max_fraction > 0.0 && s_max_fraction <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "mine.s_max_fraction must lie in (0, 1]");
    if (!(c_min > 0.0 && c_min <= 1.0)) throw Error(ErrorKind::InvalidConfig, "mine.c_min must lie in (0, 1]");
    if (!(lift_min >= 0.0)) throw Error(ErrorKind::InvalidConfig, "mine.lift_min must be >= 0");
    if (max_antecedent < 1) throw Error(ErrorKind::InvalidConfig, "mine.max_antecedent must be >= 1");
}

std::uint64_t rarity_ceiling(double s_max_fraction, std::uint64_t total) {
    return static_cast<std::uint64_t>(std::ceil(s_max_fraction * static_cast<double>(total) - 1e-9));
}

// --- symptom extraction ----------------------------------------------------

SymptomExtractor::SymptomExtractor(std::span<const MetricSeries> kpi_series, const BaselineModel& model,
                                   double z_symptom)
    : model_(model), z_symptom_(z_symptom) {
    if (!(z_symptom > 0.0)) throw Error(ErrorKind::InvalidConfig, "z_symptom must be > 0");
    for (const auto& s : kpi_series) by_cell_[s.cell_id].push_back(&s);
}

std::optional<std::vector<SymptomItem>> SymptomExtractor::extract(const std::string& cell_id,
                                                                  std::int64_t window,
                                                                  std::vector<std::string>* warnings) const {
    auto it = by_cell_.find(cell_id);
    if (it == by_cell_.end()) return std::nullopt;

    std::vector<SymptomItem> items;
    bool any_value = false;
    for (const MetricSeries* s : it->second) {
        if (s->points.empty() || s->window_len <= 0) continue;
        std::int64_t offset = window - s->points.front().window_start;
        if (offset < 0 || offset % s->window_len != 0) continue;
        auto pos = static_cast<std::size_t>(offset / s->window_len);
        if (pos >= s->points.size() || !s->points[pos].value) continue;
        any_value = true;
        AnomalyScore sc;
        try {
            sc = robust_score(model_, {cell_id, s->metric_name, hour_bucket(window)}, *s->points[pos].value);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UnknownKey) throw;
            if (warnings) warnings->push_back(std::string("no baseline for KPI ") + e.what());
            continue;
        }
        if (sc.score < z_symptom_) continue;
        if (sc.direction == Direction::Up) items.push_back({s->metric_name, SymptomState::High});
        if (sc.direction == Direction::Down) items.push_back({s->metric_name, SymptomState::Low});
    }
    if (!any_value) return std::nullopt;
    canonicalize(items);
    return items;
}

std::vector<Transaction> build_transactions(std::span<const AnomalyEvent> events,
                                            std::span<const MetricSeries> kpi_series,
                                            const BaselineModel& model, double z_symptom,
                                            std::vector<std::string>* warnings) {
    SymptomExtractor extractor(kpi_series, model, z_symptom);
    std::vector<Transaction> out;
    out.reserve(events.size());
    for (const auto& ev : events) {
        Transaction t;
        t.consequent = ev.metric_name;
        t.key = {ev.cell_id, ev.peak_window};
        if (auto items = extractor.extract(ev.cell_id, ev.peak_window, warnings)) {
            t.items = std::move(*items);
        } else if (warnings) {
            warnings->push_back("MissingKpiData: " + ev.cell_id + " @ " + std::to_string(ev.peak_window));
        }
        out.push_back(std::move(t));
    }
    return out;
}

// --- FP-Growth ---------------------------------------------------------------

namespace {

using ItemId = int;
using ItemsetCountMap = std::map<std::vector<ItemId>, std::uint64_t>;

// Items inside the tree are rank positions: 0 is the most frequent item.
class FpTree {
public:
    struct WeightedPath {
        std::vector<int> ranks;  // ascending
        std::uint64_t weight;
    };

    FpTree(const std::vector<WeightedPath>& paths, std::uint64_t min_count) {
        std::map<int, std::uint64_t> freq;
        for (const auto& p : paths)
            for (int r : p.ranks) freq[r] += p.weight;
        nodes_.push_back({-1, 0, -1, -1, {}});
        for (const auto& p : paths) {
            int cur = 0;
            for (int r : p.ranks) {
                if (freq[r] < min_count) continue;
                cur = child(cur, r);
                nodes_[static_cast<std::size_t>(cur)].count += p.weight;
            }
        }
        for (auto& [r, h] : header_) h.total = freq[r];
    }

    bool empty() const { return header_.empty(); }

    // Least frequent item first, as FP-Growth requires.
    template <typename Fn>
    void for_each_item_bottom_up(Fn&& fn) const {
        for (auto it = header_.rbegin(); it != header_.rend(); ++it) fn(it->first, it->second.total);
    }

    std::vector<WeightedPath> conditional_base(int rank) const {
        std::vector<WeightedPath> base;
        for (int n = header_.at(rank).head; n != -1; n = nodes_[static_cast<std::size_t>(n)].next) {
            const auto& node = nodes_[static_cast<std::size_t>(n)];
            WeightedPath path{{}, node.count};
            for (int p = node.parent; p > 0; p = nodes_[static_cast<std::size_t>(p)].parent)
                path.ranks.push_back(nodes_[static_cast<std::size_t>(p)].rank);
            std::reverse(path.ranks.begin(), path.ranks.end());
            base.push_back(std::move(path));
        }
        return base;
    }

private:
    struct Node {
        int rank;
        std::uint64_t count;
        int parent;
        int next;  // next node holding the same rank
        std::vector<std::pair<int, int>> children;  // (rank, node index)
    };
    struct Header {
        std::uint64_t total = 0;
        int head = -1;
    };

    int child(int parent, int rank) {
        for (const auto& [r, idx] : nodes_[static_cast<std::size_t>(parent)].children)
            if (r == rank) return idx;
        int idx = static_cast<int>(nodes_.size());
        auto& h = header_[rank];
        nodes_.push_back({rank, 0, parent, h.head, {}});
        h.head = idx;
        nodes_[static_cast<std::size_t>(parent)].children.emplace_back(rank, idx);
        return idx;
    }

    std::vector<Node> nodes_;
    std::map<int, Header> header_;
};

void fp_growth(const FpTree& tree, std::vector<int>& prefix, std::uint64_t min_count, std::size_t max_len,
               std::map<std::vector<int>, std::uint64_t>& out) {
    tree.for_each_item_bottom_up([&](int rank, std::uint64_t total) {
        prefix.push_back(rank);
        std::vector<int> itemset = prefix;
        std::sort(itemset.begin(), itemset.end());
        out.emplace(std::move(itemset), total);
        if (prefix.size() < max_len) {
            FpTree cond(tree.conditional_base(rank), min_count);
            if (!cond.empty()) fp_growth(cond, prefix, min_count, max_len, out);
        }
        prefix.pop_back();
    });
}

Fingerprint make_rule(std::vector<SymptomItem> antecedent, const std::string& consequent,
                      std::uint64_t support_count, std::uint64_t antecedent_count, std::uint64_t consequent_total,
                      std::uint64_t transaction_total) {
    Fingerprint f;
    f.antecedent = std::move(antecedent);
    f.consequent = consequent;
    f.support_count = support_count;
    f.antecedent_count = antecedent_count;
    const auto n = static_cast<double>(transaction_total);
    f.support = static_cast<double>(support_count) / n;
    f.confidence = static_cast<double>(support_count) / static_cast<double>(antecedent_count);
    f.lift = f.confidence / (static_cast<double>(consequent_total) / n);
    return f;
}

bool passes(const Fingerprint& f, const MineConfig& cfg) {
    return f.confidence >= cfg.c_min && f.lift >= cfg.lift_min;
}

}  // namespace

std::vector<Fingerprint> mine_rare_rules(std::span<const Transaction> transactions, const MineConfig& cfg) {
    cfg.validate();
    std::vector<Fingerprint> rules;
    if (transactions.empty()) return rules;
    const std::uint64_t total = transactions.size();
    const std::uint64_t ceiling = rarity_ceiling(cfg.s_max_fraction, total);
    if (ceiling < cfg.s_min_count) return rules;

    // Item universe in canonical order; ids follow that order.
    std::set<SymptomItem> universe_set;
    for (const auto& t : transactions) universe_set.insert(t.items.begin(), t.items.end());
    std::vector<SymptomItem> universe(universe_set.begin(), universe_set.end());
    auto id_of = [&](const SymptomItem& item) {
        return static_cast<ItemId>(std::lower_bound(universe.begin(), universe.end(), item) - universe.begin());
    };

    std::vector<std::vector<ItemId>> encoded;
    encoded.reserve(transactions.size());
    std::vector<std::uint64_t> global_freq(universe.size(), 0);
    for (const auto& t : transactions) {
        std::vector<ItemId> ids;
        for (const auto& item : t.items) ids.push_back(id_of(item));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (ItemId id : ids) ++global_freq[static_cast<std::size_t>(id)];
        encoded.push_back(std::move(ids));
    }

    // Rank: descending global frequency, ties by canonical item order.
    std::vector<ItemId> by_rank(universe.size());
    for (std::size_t i = 0; i < by_rank.size(); ++i) by_rank[i] = static_cast<ItemId>(i);
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](ItemId a, ItemId b) {
        return global_freq[static_cast<std::size_t>(a)] > global_freq[static_cast<std::size_t>(b)];
    });
    std::vector<int> rank_of(universe.size());
    for (std::size_t r = 0; r < by_rank.size(); ++r) rank_of[static_cast<std::size_t>(by_rank[r])] = static_cast<int>(r);

    std::map<std::string, std::vector<std::size_t>> by_consequent;
    for (std::size_t i = 0; i < transactions.size(); ++i) by_consequent[transactions[i].consequent].push_back(i);

    std::map<std::vector<ItemId>, std::uint64_t> antecedent_counts;
    auto antecedent_count = [&](const std::vector<ItemId>& itemset) {
        auto it = antecedent_counts.find(itemset);
        if (it != antecedent_counts.end()) return it->second;
        std::uint64_t c = 0;
        for (const auto& ids : encoded)
            if (std::includes(ids.begin(), ids.end(), itemset.begin(), itemset.end())) ++c;
        antecedent_counts.emplace(itemset, c);
        return c;
    };

    for (const auto& [consequent, idx] : by_consequent) {
        std::vector<FpTree::WeightedPath> paths;
        paths.reserve(idx.size());
        for (std::size_t i : idx) {
            FpTree::WeightedPath p{{}, 1};
            for (ItemId id : encoded[i]) p.ranks.push_back(rank_of[static_cast<std::size_t>(id)]);
            std::sort(p.ranks.begin(), p.ranks.end());
            paths.push_back(std::move(p));
        }
        FpTree tree(paths, cfg.s_min_count);
        std::map<std::vector<int>, std::uint64_t> frequent;
        std::vector<int> prefix;
        fp_growth(tree, prefix, cfg.s_min_count, cfg.max_antecedent, frequent);

        for (const auto& [ranks, count] : frequent) {
            if (count > ceiling) continue;
            std::vector<ItemId> ids;
            for (int r : ranks) ids.push_back(by_rank[static_cast<std::size_t>(r)]);
            std::sort(ids.begin(), ids.end());
            std::vector<SymptomItem> antecedent;
            for (ItemId id : ids) antecedent.push_back(universe[static_cast<std::size_t>(id)]);
            auto rule = make_rule(std::move(antecedent), consequent, count, antecedent_count(ids), idx.size(), total);
            if (passes(rule, cfg)) rules.push_back(std::move(rule));
        }
    }
    std::sort(rules.begin(), rules.end(), rule_order);
    return rules;
}

// --- count-table route -------------------------------------------------------

void ItemsetCounts::add(const Transaction& t) {
    ++transaction_total_;
    ++consequent_totals_[t.consequent];
    std::vector<std::string> keys;
    for (const auto& item : t.items) keys.push_back(item.key());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    // Enumerate subsets of size 1..max_len by extending sorted prefixes.
    std::vector<std::string> subset;
    auto recurse = [&](auto& self, std::size_t start) -> void {
        for (std::size_t i = start; i < keys.size(); ++i) {
            subset.push_back(keys[i]);
            ++table_[subset][t.consequent];
            if (subset.size() < max_len_) self(self, i + 1);
            subset.pop_back();
        }
    };
    recurse(recurse, 0);
}

void ItemsetCounts::merge(const ItemsetCounts& other) {
    if (other.max_len_ != max_len_) throw Error(ErrorKind::IncompatibleSketch, "itemset tables differ in max_len");
    transaction_total_ += other.transaction_total_;
    for (const auto& [q, c] : other.consequent_totals_) consequent_totals_[q] += c;
    for (const auto& [itemset, per_q] : other.table_) {
        auto& dst = table_[itemset];
        for (const auto& [q, c] : per_q) dst[q] += c;
    }
}

std::size_t ItemsetCounts::entry_count() const {
    std::size_t n = 0;
    for (const auto& [itemset, per_q] : table_) n += per_q.size();
    return n;
}

std::vector<Fingerprint> mine_from_counts(const ItemsetCounts& counts, const MineConfig& cfg) {
    cfg.validate();
    if (cfg.max_antecedent > counts.max_len())
        throw Error(ErrorKind::InvalidConfig, "itemset table built with smaller max_len than mine.max_antecedent");
    std::vector<Fingerprint> rules;
    const std::uint64_t total = counts.transaction_total();
    if (total == 0) return rules;
    const std::uint64_t ceiling = rarity_ceiling(cfg.s_max_fraction, total);

    for (const auto& [itemset, per_q] : counts.table()) {
        if (itemset.size() > cfg.max_antecedent) continue;
        std::uint64_t antecedent_count = 0;
        for (const auto& [q, c] : per_q) antecedent_count += c;
        for (const auto& [q, c] : per_q) {
            if (c < cfg.s_min_count || c > ceiling) continue;
            std::vector<SymptomItem> antecedent;
            for (const auto& k : itemset) antecedent.push_back(SymptomItem::parse(k));
            auto rule = make_rule(std::move(antecedent), q, c, antecedent_count, counts.consequent_totals().at(q),
                                  total);
            if (passes(rule, cfg)) rules.push_back(std::move(rule));
        }
    }
    std::sort(rules.begin(), rules.end(), rule_order);
    return rules;
}

// --- database ----------------------------------------------------------------

FingerprintDb update_db(const FingerprintDb& db, std::span<const Fingerprint> new_rules, const LabelMap& labels,
                        std::int64_t built_at, std::uint64_t transaction_total) {
    std::map<RuleKey, Fingerprint> merged;
    for (const auto& r : db.rules) merged.insert_or_assign({r.antecedent, r.consequent}, r);
    for (const auto& r : new_rules) {
        RuleKey key{r.antecedent, r.consequent};
        auto it = merged.find(key);
        std::optional<std::string> old_label = it != merged.end() ? it->second.cause_label : std::nullopt;
        Fingerprint next = r;
        if (!next.cause_label) next.cause_label = old_label;
        merged.insert_or_assign(std::move(key), std::move(next));
    }
    for (auto& [key, rule] : merged)
        if (auto l = labels.find(key); l != labels.end()) rule.cause_label = l->second;

    FingerprintDb out;
    out.schema_version = kFingerprintSchemaVersion;
    out.built_at = built_at;
    out.transaction_total = std::max(db.transaction_total, transaction_total);
    for (auto& [key, rule] : merged) {
        out.transaction_total = std::max(out.transaction_total, rule.antecedent_count);
        out.rules.push_back(std::move(rule));
    }
    std::sort(out.rules.begin(), out.rules.end(), rule_order);
    return out;
}

nlohmann::ordered_json items_to_json(std::span<const SymptomItem> items) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& i : items) arr.push_back(i.key());
    return arr;
}

std::vector<SymptomItem> items_from_json(const nlohmann::json& arr) {
    std::vector<SymptomItem> items;
    for (const auto& v : arr) items.push_back(SymptomItem::parse(v.get<std::string>()));
    return items;
}

nlohmann::ordered_json rule_to_json(const Fingerprint& f) {
    nlohmann::ordered_json doc;
    doc["antecedent"] = items_to_json(f.antecedent);
    doc["consequent"] = f.consequent;
    doc["support"] = f.support;
    doc["support_count"] = f.support_count;
    doc["antecedent_count"] = f.antecedent_count;
    doc["confidence"] = f.confidence;
    doc["lift"] = f.lift;
    doc["cause_label"] = f.cause_label ? nlohmann::ordered_json(*f.cause_label) : nlohmann::ordered_json();
    return doc;
}

Fingerprint rule_from_json(const nlohmann::json& r) {
    Fingerprint f;
    f.antecedent = items_from_json(r.at("antecedent"));
    f.consequent = r.at("consequent").get<std::string>();
    f.support = r.at("support").get<double>();
    f.support_count = r.at("support_count").get<std::uint64_t>();
    f.antecedent_count = r.at("antecedent_count").get<std::uint64_t>();
    f.confidence = r.at("confidence").get<double>();
    f.lift = r.at("lift").get<double>();
    if (r.contains("cause_label") && !r.at("cause_label").is_null())
        f.cause_label = r.at("cause_label").get<std::string>();
    return f;
}

nlohmann::ordered_json db_to_json(const FingerprintDb& db) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = db.schema_version;
    doc["kind"] = "fingerprint_db";
    doc["built_at"] = db.built_at;
    doc["transaction_total"] = db.transaction_total;
    auto& rules = doc["rules"] = nlohmann::ordered_json::array();
    for (const auto& r : db.rules) rules.push_back(rule_to_json(r));
    return doc;
}

FingerprintDb db_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("schema_version") ||
        doc.at("schema_version") != kFingerprintSchemaVersion)
        throw Error(ErrorKind::SchemaMismatch,
                    "fingerprint db schema_version must be " + std::to_string(kFingerprintSchemaVersion));
    FingerprintDb db;
    std::set<RuleKey> seen;
    try {
        db.built_at = doc.at("built_at").get<std::int64_t>();
        db.transaction_total = doc.at("transaction_total").get<std::uint64_t>();
        for (const auto& r : doc.at("rules")) {
            Fingerprint f = rule_from_json(r);

            auto canonical = f.antecedent;
            canonicalize(canonical);
            auto where = "rule " + items_to_json(f.antecedent).dump() + " -> " + f.consequent + ": ";
            if (f.antecedent.empty() || canonical != f.antecedent)
                throw Error(ErrorKind::CorruptDb, where + "antecedent must be a nonempty sorted set");
            if (f.consequent.empty()) throw Error(ErrorKind::CorruptDb, where + "empty consequent");
            if (!(f.support > 0.0 && f.support <= 1.0)) throw Error(ErrorKind::CorruptDb, where + "support outside (0,1]");
            if (!(f.confidence > 0.0 && f.confidence <= 1.0))
                throw Error(ErrorKind::CorruptDb, where + "confidence outside (0,1]");
            if (!(f.lift > 0.0) || !std::isfinite(f.lift)) throw Error(ErrorKind::CorruptDb, where + "lift must be > 0");
            if (f.support_count < 1 || f.support_count > f.antecedent_count ||
                f.antecedent_count > db.transaction_total)
                throw Error(ErrorKind::CorruptDb, where + "inconsistent counts");
            double expected = static_cast<double>(f.support_count) / static_cast<double>(f.antecedent_count);
            if (std::abs(expected - f.confidence) > 1e-9)
                throw Error(ErrorKind::CorruptDb, where + "confidence disagrees with counts");
            if (!seen.insert({f.antecedent, f.consequent}).second)
                throw Error(ErrorKind::CorruptDb, where + "duplicate rule");
            db.rules.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CorruptDb, std::string("fingerprint db: ") + e.what());
    }
    return db;
}

std::string serialize_db(const FingerprintDb& db) { return db_to_json(db).dump(2) + "\n"; }

void save_db(const FingerprintDb& db, const std::filesystem::path& path) { write_file(path, serialize_db(db)); }

FingerprintDb load_db(const std::filesystem::path& path) {
    auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::CorruptDb, "fingerprint db is not valid JSON");
    return db_from_json(doc);
}

LabelMap labels_from_json(const nlohmann::json& doc) {
    const char* field = doc.contains("labels") ? "labels" : "planted_rules";
    if (!doc.contains(field)) throw Error(ErrorKind::InvalidConfig, "label file needs 'labels' or 'planted_rules'");
    LabelMap labels;
    try {
        for (const auto& l : doc.at(field)) {
            auto items = items_from_json(l.at("antecedent"));
            canonicalize(items);
            labels[{std::move(items), l.at("consequent").get<std::string>()}] = l.at("cause_label").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("labels: ") + e.what());
    }
    return labels;
}

LabelMap load_labels(const std::filesystem::path& path) {
    auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::InvalidConfig, "label file is not valid JSON");
    return labels_from_json(doc);
}

}  // namespace fogdna
