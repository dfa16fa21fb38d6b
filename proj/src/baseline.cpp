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

#include "baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cleaning.hpp"
#include "common.hpp"

namespace fogdna {

namespace {

struct Mass {
    double x;
    std::uint64_t n;
};

double order_stat(const std::vector<Mass>& sorted, std::uint64_t k) {
    std::uint64_t cum = 0;
    for (const auto& m : sorted) {
        cum += m.n;
        if (cum > k) return m.x;
    }
    return sorted.back().x;
}

// Linear-interpolation median of a weighted sample sorted by x.
double weighted_median(const std::vector<Mass>& sorted, std::uint64_t total) {
    double h = (static_cast<double>(total) - 1.0) * 0.5;
    auto k = static_cast<std::uint64_t>(std::floor(h));
    double frac = h - static_cast<double>(k);
    double a = order_stat(sorted, k);
    if (frac == 0.0) return a;
    double b = order_stat(sorted, k + 1);
    return a + frac * (b - a);
}

nlohmann::ordered_json extents_json(const HistogramSketch& s) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : s.extents()) arr.push_back({e.bin, e.min, e.max});
    return arr;
}

}  // namespace

HistogramSketch::HistogramSketch(double lo, double hi, std::size_t bin_count)
    : lo_(lo),
      hi_(hi),
      counts_(bin_count, 0),
      bin_min_(bin_count, std::numeric_limits<double>::infinity()),
      bin_max_(bin_count, -std::numeric_limits<double>::infinity()) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorKind::InvalidConfig, "histogram bounds must satisfy lo < hi");
    if (bin_count == 0) throw Error(ErrorKind::InvalidConfig, "histogram needs at least one bin");
}

HistogramSketch HistogramSketch::from_parts(double lo, double hi, std::vector<std::uint64_t> counts,
                                            std::uint64_t underflow, std::uint64_t overflow,
                                            const std::vector<BinExtent>& extents) {
    HistogramSketch s(lo, hi, counts.size());
    s.counts_ = std::move(counts);
    s.underflow_ = underflow;
    s.overflow_ = overflow;
    for (const auto& e : extents) {
        if (e.bin >= s.counts_.size() || s.counts_[e.bin] == 0 || !(e.min <= e.max) || e.min < lo || e.max > hi)
            throw Error(ErrorKind::InvalidConfig, "histogram extent out of range");
        s.bin_min_[e.bin] = e.min;
        s.bin_max_[e.bin] = e.max;
    }
    const double w = s.bin_width();
    for (std::size_t b = 0; b < s.counts_.size(); ++b) {
        if (s.counts_[b] == 0 || s.bin_min_[b] <= s.bin_max_[b]) continue;
        s.bin_min_[b] = lo + static_cast<double>(b) * w;
        s.bin_max_[b] = b + 1 == s.counts_.size() ? hi : lo + static_cast<double>(b + 1) * w;
    }
    return s;
}

void HistogramSketch::insert(double value) {
    if (value < lo_) {
        ++underflow_;
    } else if (value > hi_) {
        ++overflow_;
    } else {
        auto n = counts_.size();
        auto bin = std::min(static_cast<std::size_t>((value - lo_) / (hi_ - lo_) * static_cast<double>(n)), n - 1);
        ++counts_[bin];
        bin_min_[bin] = std::min(bin_min_[bin], value);
        bin_max_[bin] = std::max(bin_max_[bin], value);
    }
}

bool HistogramSketch::compatible(const HistogramSketch& other) const {
    return lo_ == other.lo_ && hi_ == other.hi_ && counts_.size() == other.counts_.size();
}

void HistogramSketch::merge(const HistogramSketch& other) {
    if (!compatible(other)) throw Error(ErrorKind::IncompatibleSketch, "sketch bounds or bin count differ");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
        bin_min_[i] = std::min(bin_min_[i], other.bin_min_[i]);
        bin_max_[i] = std::max(bin_max_[i], other.bin_max_[i]);
    }
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
}

double HistogramSketch::bin_midpoint(std::size_t bin) const {
    return lo_ + (static_cast<double>(bin) + 0.5) * bin_width();
}

double HistogramSketch::bin_value(std::size_t bin) const {
    double mid = bin_midpoint(bin);
    if (counts_[bin] == 0) return mid;
    return std::clamp(mid, bin_min_[bin], bin_max_[bin]);
}

std::vector<HistogramSketch::BinExtent> HistogramSketch::extents() const {
    std::vector<BinExtent> out;
    for (std::size_t b = 0; b < counts_.size(); ++b)
        if (counts_[b]) out.push_back({b, bin_min_[b], bin_max_[b]});
    return out;
}

std::uint64_t HistogramSketch::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), underflow_ + overflow_);
}

MedianMad HistogramSketch::median_mad() const {
    const std::uint64_t n = total();
    if (n == 0) return {std::nan(""), std::nan("")};

    std::vector<Mass> masses;
    masses.reserve(counts_.size() + 2);
    if (underflow_) masses.push_back({lo_, underflow_});
    for (std::size_t b = 0; b < counts_.size(); ++b)
        if (counts_[b]) masses.push_back({bin_value(b), counts_[b]});
    if (overflow_) masses.push_back({hi_, overflow_});

    double median = weighted_median(masses, n);
    for (auto& m : masses) m.x = std::abs(m.x - median);
    std::stable_sort(masses.begin(), masses.end(), [](const Mass& a, const Mass& b) { return a.x < b.x; });
    return {median, weighted_median(masses, n)};
}

void DetectorConfig::validate() const {
    if (bin_count < 8) throw Error(ErrorKind::InvalidConfig, "detector.bin_count must be >= 8");
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidConfig, "detector.tau must be > 0");
    if (min_samples < 1) throw Error(ErrorKind::InvalidConfig, "detector.min_samples must be >= 1");
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "UP";
        case Direction::Down: return "DOWN";
        case Direction::None: return "NONE";
    }
    return "NONE";
}

Direction parse_direction(std::string_view text) {
    if (text == "UP") return Direction::Up;
    if (text == "DOWN") return Direction::Down;
    if (text == "NONE") return Direction::None;
    throw Error(ErrorKind::InvalidConfig, "unknown direction '" + std::string(text) + "'");
}

BoundsTable bounds_from_catalog(const MetricCatalog& catalog) {
    BoundsTable table;
    for (const auto& [name, info] : catalog)
        if (info.range) table.emplace(name, *info.range);
    return table;
}

int hour_bucket(std::int64_t window_start) {
    return static_cast<int>(floor_div(window_start, 3600) - floor_div(window_start, 86400) * 24);
}

BaselineModel fit_baseline(std::span<const MetricSeries> train, const DetectorConfig& cfg,
                           const BoundsTable& fixed_bounds) {
    cfg.validate();
    if (train.empty()) throw Error(ErrorKind::EmptyTraining, "no training series");

    std::map<BaselineKey, std::vector<double>> values;
    BaselineModel model;
    model.config = cfg;
    for (const auto& s : train) {
        auto [it, inserted] = model.polarities.emplace(s.metric_name, s.polarity);
        if (!inserted && it->second != s.polarity)
            throw Error(ErrorKind::InvalidConfig, "metric '" + s.metric_name + "' has conflicting polarity");
        for (const auto& p : s.points)
            if (p.value) values[{s.cell_id, s.metric_name, hour_bucket(p.window_start)}].push_back(*p.value);
    }
    if (values.empty()) throw Error(ErrorKind::EmptyTraining, "training series hold no values");

    for (auto& [key, vals] : values) {
        double lo;
        double hi;
        if (auto fb = fixed_bounds.find(key.metric_name); fb != fixed_bounds.end()) {
            std::tie(lo, hi) = fb->second;
        } else {
            auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
            double span = *mx - *mn;
            // Constant keys still need a nonempty range.
            double margin = span > 0.0 ? 0.05 * span : std::max(0.05 * std::abs(*mn), 0.5);
            lo = *mn - margin;
            hi = *mx + margin;
        }
        BaselineEntry entry{HistogramSketch(lo, hi, cfg.bin_count), vals.size()};
        for (double v : vals) entry.sketch.insert(v);
        model.entries.emplace(key, std::move(entry));
    }
    return model;
}

double robust_z(double value, const MedianMad& mm) {
    return std::abs(value - mm.median) / (kMadConsistency * mm.mad + kScoreEpsilon);
}

AnomalyScore make_score(double value, const MedianMad& mm, Polarity polarity, bool sufficient) {
    AnomalyScore s;
    s.score = robust_z(value, mm);
    s.direction = value > mm.median ? Direction::Up : value < mm.median ? Direction::Down : Direction::None;
    s.degrading = (s.direction == Direction::Up && polarity == Polarity::HigherIsWorse) ||
                  (s.direction == Direction::Down && polarity == Polarity::LowerIsWorse);
    s.sufficient_data = sufficient;
    return s;
}

AnomalyScore robust_score(const BaselineModel& model, const BaselineKey& key, double value) {
    auto it = model.entries.find(key);
    if (it == model.entries.end())
        throw Error(ErrorKind::UnknownKey,
                    key.cell_id + "/" + key.metric_name + "/hour " + std::to_string(key.hour));
    return make_score(value, it->second.sketch.median_mad(), model.polarities.at(key.metric_name),
                      model.sufficient(it->second));
}

std::vector<ScoredWindow> score_windows(const BaselineModel& model, const MetricSeries& test, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be > 0");
    auto pol = model.polarities.find(test.metric_name);

    // Per-hour statistics, computed lazily once.
    struct HourStats {
        const BaselineEntry* entry = nullptr;
        MedianMad mm;
    };
    std::map<int, HourStats> hours;

    std::vector<ScoredWindow> out;
    out.reserve(test.points.size());
    for (const auto& p : test.points) {
        ScoredWindow w;
        w.window_start = p.window_start;
        if (p.value) {
            int hour = hour_bucket(p.window_start);
            auto h = hours.find(hour);
            if (h == hours.end()) {
                auto it = model.entries.find({test.cell_id, test.metric_name, hour});
                if (it == model.entries.end() || pol == model.polarities.end())
                    throw Error(ErrorKind::UnknownKey,
                                test.cell_id + "/" + test.metric_name + "/hour " + std::to_string(hour));
                h = hours.emplace(hour, HourStats{&it->second, it->second.sketch.median_mad()}).first;
            }
            w.score = make_score(*p.value, h->second.mm, pol->second, model.sufficient(*h->second.entry));
            w.flagged = w.score.score >= tau && w.score.degrading && w.score.sufficient_data;
        }
        out.push_back(w);
    }
    return out;
}

ScoredSeries score_series(const BaselineModel& model, const MetricSeries& test, double tau) {
    auto pol = model.polarities.find(test.metric_name);
    return {test.cell_id, test.metric_name, pol != model.polarities.end() ? pol->second : test.polarity,
            test.window_len, score_windows(model, test, tau)};
}

BaselineModel merge_baselines(std::span<const BaselineModel> models) {
    if (models.empty()) throw Error(ErrorKind::EmptyTraining, "merge of zero models");
    BaselineModel out;
    out.config = models.front().config;
    for (const auto& m : models) {
        if (!(m.config == out.config)) throw Error(ErrorKind::IncompatibleSketch, "detector configs differ");
        for (const auto& [metric, pol] : m.polarities) {
            auto [it, inserted] = out.polarities.emplace(metric, pol);
            if (!inserted && it->second != pol)
                throw Error(ErrorKind::IncompatibleSketch, "polarity differs for '" + metric + "'");
        }
        for (const auto& [key, entry] : m.entries) {
            auto [it, inserted] = out.entries.emplace(key, entry);
            if (!inserted) {
                if (!it->second.sketch.compatible(entry.sketch))
                    throw Error(ErrorKind::IncompatibleSketch, key.cell_id + "/" + key.metric_name +
                                                                   "/hour " + std::to_string(key.hour));
                it->second.sketch.merge(entry.sketch);
                it->second.sample_count += entry.sample_count;
            }
        }
    }
    return out;
}

MedianMad exact_median_mad(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double median = linear_quantile(sorted, 0.5);
    for (auto& v : sorted) v = std::abs(v - median);
    std::sort(sorted.begin(), sorted.end());
    return {median, linear_quantile(sorted, 0.5)};
}

AnomalyScore exact_robust_score(std::span<const double> data, double value, Polarity polarity) {
    return make_score(value, exact_median_mad(data), polarity, true);
}

nlohmann::ordered_json model_to_json(const BaselineModel& model) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kBaselineSchemaVersion;
    doc["kind"] = "baseline_model";
    doc["config"] = {{"bin_count", model.config.bin_count},
                     {"tau", model.config.tau},
                     {"min_samples", model.config.min_samples}};
    auto& metrics = doc["metrics"] = nlohmann::ordered_json::object();
    for (const auto& [name, pol] : model.polarities) metrics[name] = to_string(pol);
    auto& keys = doc["keys"] = nlohmann::ordered_json::array();
    for (const auto& [key, entry] : model.entries) {
        const auto& s = entry.sketch;
        keys.push_back({{"cell_id", key.cell_id},
                        {"metric_name", key.metric_name},
                        {"hour", key.hour},
                        {"sample_count", entry.sample_count},
                        {"lo", s.lo()},
                        {"hi", s.hi()},
                        {"bin_count", s.bin_count()},
                        {"underflow", s.underflow()},
                        {"overflow", s.overflow()},
                        {"counts", s.counts()},
                        {"extents", extents_json(s)}});
    }
    return doc;
}

BaselineModel model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("schema_version") ||
        doc.at("schema_version") != kBaselineSchemaVersion)
        throw Error(ErrorKind::SchemaMismatch, "baseline model schema_version must be " +
                                                   std::to_string(kBaselineSchemaVersion));
    BaselineModel model;
    try {
        const auto& cfg = doc.at("config");
        model.config.bin_count = cfg.at("bin_count").get<std::size_t>();
        model.config.tau = cfg.at("tau").get<double>();
        model.config.min_samples = cfg.at("min_samples").get<std::uint64_t>();
        for (const auto& [name, pol] : doc.at("metrics").items())
            model.polarities.emplace(name, parse_polarity(pol.get<std::string>()));
        for (const auto& k : doc.at("keys")) {
            BaselineKey key{k.at("cell_id").get<std::string>(), k.at("metric_name").get<std::string>(),
                            k.at("hour").get<int>()};
            auto counts = k.at("counts").get<std::vector<std::uint64_t>>();
            if (counts.size() != k.at("bin_count").get<std::size_t>() || key.hour < 0 || key.hour > 23 ||
                !model.polarities.contains(key.metric_name))
                throw Error(ErrorKind::CorruptDb, "malformed sketch for " + key.cell_id + "/" + key.metric_name);
            std::vector<HistogramSketch::BinExtent> extents;
            if (k.contains("extents"))
                for (const auto& e : k.at("extents"))
                    extents.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>()});
            BaselineEntry entry{HistogramSketch::from_parts(k.at("lo").get<double>(), k.at("hi").get<double>(),
                                                            std::move(counts), k.at("underflow").get<std::uint64_t>(),
                                                            k.at("overflow").get<std::uint64_t>(), extents),
                                k.at("sample_count").get<std::uint64_t>()};
            if (entry.sample_count != entry.sketch.total())
                throw Error(ErrorKind::CorruptDb, "sample_count disagrees with sketch total for " +
                                                      key.cell_id + "/" + key.metric_name);
            if (!model.entries.emplace(std::move(key), std::move(entry)).second)
                throw Error(ErrorKind::CorruptDb, "duplicate baseline key");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CorruptDb, std::string("baseline model: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidConfig) throw;
        throw Error(ErrorKind::CorruptDb, std::string("baseline model: ") + e.what());
    }
    model.config.validate();
    return model;
}

std::string serialize_model(const BaselineModel& model) { return model_to_json(model).dump() + "\n"; }

void save_model(const BaselineModel& model, const std::filesystem::path& path) {
    write_file(path, serialize_model(model));
}

BaselineModel load_model(const std::filesystem::path& path) {
    auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::CorruptDb, "baseline model is not valid JSON");
    return model_from_json(doc);
}

BaselineModel restrict_to_cells(const BaselineModel& model, const std::vector<std::string>& cells) {
    BaselineModel out;
    out.config = model.config;
    out.polarities = model.polarities;
    for (const auto& [key, entry] : model.entries)
        if (std::find(cells.begin(), cells.end(), key.cell_id) != cells.end()) out.entries.emplace(key, entry);
    return out;
}

}  // namespace fogdna
