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

#include "synth.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "common.hpp"

namespace fogdna {

namespace {

// 1.4826 * MAD of a unit normal; converts MAD-unit magnitudes into sigmas.
constexpr double kMadUnit = kMadConsistency * 0.6744897501960817;

constexpr std::uint64_t kDefaultPlanSeed = 20240101;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

MetricGenerator diurnal(std::string name, MetricKind kind, Polarity pol, double base, double amp, double sigma) {
    MetricGenerator g;
    g.name = std::move(name);
    g.kind = kind;
    g.polarity = pol;
    g.sigma = sigma;
    for (int h = 0; h < 24; ++h)
        g.hourly_mean[static_cast<std::size_t>(h)] =
            round4(base + amp * std::sin(2.0 * std::numbers::pi * (h - 8) / 24.0));
    g.range = {round4(base - std::abs(amp) - 6.0 * sigma), round4(base + std::abs(amp) + 6.0 * sigma)};
    return g;
}

ScenarioSpec base_spec() {
    ScenarioSpec s;
    using K = MetricKind;
    using P = Polarity;
    s.metrics = {
        diurnal("page_response_ms", K::Kqi, P::HigherIsWorse, 800.0, 100.0, 40.0),
        diurnal("video_throughput_kbps", K::Kqi, P::LowerIsWorse, 4000.0, 400.0, 200.0),
        diurnal("prb_utilization_pct", K::Kpi, P::HigherIsWorse, 45.0, 10.0, 3.0),
        diurnal("rtt_ms", K::Kpi, P::HigherIsWorse, 30.0, 5.0, 2.0),
        diurnal("packet_loss_pct", K::Kpi, P::HigherIsWorse, 0.5, 0.1, 0.05),
        diurnal("rsrp_dbm", K::Kpi, P::LowerIsWorse, -90.0, 0.0, 2.0),
        diurnal("handover_fail_pct", K::Kpi, P::HigherIsWorse, 2.0, 0.3, 0.2),
        diurnal("sinr_db", K::Kpi, P::LowerIsWorse, 15.0, 1.0, 1.0),
    };
    auto item = [](const char* m, SymptomState st) { return SymptomItem{m, st}; };
    s.causes = {
        {"congestion", {item("prb_utilization_pct", SymptomState::High), item("rtt_ms", SymptomState::High)},
         "page_response_ms"},
        {"backhaul_loss", {item("packet_loss_pct", SymptomState::High)}, "page_response_ms"},
        {"coverage_hole", {item("handover_fail_pct", SymptomState::High), item("rsrp_dbm", SymptomState::Low)},
         "video_throughput_kbps"},
        {"interference", {item("sinr_db", SymptomState::Low)}, "video_throughput_kbps"},
    };
    // Each cause recurs only a handful of times among all events, so the
    // rarity band has to admit counts of 2..N/2.
    s.pipeline = {{"mine", {{"s_min_count", 2}, {"s_max_fraction", 0.5}}}};
    return s;
}

void plan_anomalies(ScenarioSpec& spec, std::size_t n, std::uint64_t plan_seed, double magnitude) {
    Rng rng(plan_seed);
    auto cells = spec.cell_ids();
    for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[rng.below(i)]);

    const auto n_windows = static_cast<std::int64_t>(spec.window_count());
    const std::int64_t first_test = (spec.test_start() - spec.start_time) / spec.window_len;
    std::string fallback_kqi;
    for (const auto& m : spec.metrics)
        if (m.kind == MetricKind::Kqi) {
            fallback_kqi = m.name;
            break;
        }

    spec.anomalies.clear();
    for (std::size_t i = 0; i < n; ++i) {
        PlannedAnomaly a;
        a.cell_id = cells[i % cells.size()];
        a.magnitude = magnitude;
        a.duration_windows = 6 + static_cast<std::int64_t>(rng.below(7));
        if (!spec.causes.empty()) {
            const auto& c = spec.causes[i % spec.causes.size()];
            a.cause = c.cause_label;
            a.kqi = c.kqi;
        } else {
            a.kqi = fallback_kqi;
        }
        std::int64_t lo = first_test + 2;
        std::int64_t hi = n_windows - a.duration_windows - 2;
        std::int64_t idx = hi > lo ? lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo))) : lo;
        a.start = spec.start_time + idx * spec.window_len;
        spec.anomalies.push_back(std::move(a));
    }
}

}  // namespace

// --- Rng ---------------------------------------------------------------------

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

double Rng::normal() {
    // Box-Muller, cosine branch only.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

std::uint64_t Rng::poisson(double lambda) {
    // Knuth's product method; fine for the small rates used here.
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = uniform();
    while (p > limit) {
        ++k;
        p *= uniform();
    }
    return k;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

// --- spec ----------------------------------------------------------------------

std::vector<std::string> ScenarioSpec::cell_ids() const {
    std::vector<std::string> ids;
    ids.reserve(n_cells);
    char buf[32];
    for (std::size_t i = 0; i < n_cells; ++i) {
        std::snprintf(buf, sizeof buf, "c%03zu", i);
        ids.emplace_back(buf);
    }
    return ids;
}

std::size_t ScenarioSpec::window_count() const {
    return static_cast<std::size_t>(days * 86400 / window_len);
}

std::int64_t ScenarioSpec::test_start() const {
    auto n = static_cast<double>(window_count());
    auto n_train = static_cast<std::int64_t>(std::ceil(n * train_fraction - 1e-9));
    return start_time + n_train * window_len;
}

std::int64_t ScenarioSpec::end_time() const {
    return start_time + static_cast<std::int64_t>(window_count()) * window_len;
}

MetricCatalog ScenarioSpec::catalog() const {
    MetricCatalog cat;
    for (const auto& m : metrics) cat[m.name] = {m.kind, m.polarity, window_len, m.range};
    double max_calls = std::max(10.0, std::ceil(cdr_calls_per_window * 4.0 + 10.0));
    cat[std::string(kCallAttempts)] = {MetricKind::Kqi, Polarity::LowerIsWorse, window_len,
                                       std::make_pair(0.0, max_calls)};
    cat[std::string(kDropRate)] = {MetricKind::Kqi, Polarity::HigherIsWorse, window_len, std::make_pair(0.0, 1.0)};
    cat[std::string(kMeanDuration)] = {MetricKind::Kqi, Polarity::LowerIsWorse, window_len,
                                       std::make_pair(0.0, std::ceil(cdr_mean_duration * 12.0))};
    return cat;
}

void ScenarioSpec::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidSpec, m); };
    if (n_cells == 0) fail("n_cells must be > 0");
    if (days <= 0) fail("days must be > 0");
    if (window_len <= 0 || 86400 % window_len != 0) fail("window_len must divide one day");
    if (start_time % 86400 != 0) fail("start_time must fall on a UTC midnight");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0, 1)");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must lie in [0, 1)");
    if (!(corruption_rate >= 0.0 && corruption_rate < 1.0)) fail("corruption_rate must lie in [0, 1)");
    if (!(symptom_magnitude > 0.0)) fail("symptom_magnitude must be > 0");
    if (!(cdr_calls_per_window >= 0.0 && cdr_calls_per_window < 500.0)) fail("cdr calls_per_window out of range");
    if (!(cdr_drop_probability >= 0.0 && cdr_drop_probability <= 1.0)) fail("cdr drop_probability out of range");
    if (!(cdr_mean_duration > 0.0)) fail("cdr mean_duration must be > 0");
    if (metrics.empty()) fail("at least one metric generator required");

    std::map<std::string, const MetricGenerator*> by_name;
    for (const auto& m : metrics) {
        if (m.name.empty() || m.name.find_first_of(",=\n") != std::string::npos) fail("bad metric name '" + m.name + "'");
        if (!by_name.emplace(m.name, &m).second) fail("duplicate metric '" + m.name + "'");
        if (!(m.sigma > 0.0)) fail("metric '" + m.name + "' needs sigma > 0");
        if (!(m.range.first < m.range.second)) fail("metric '" + m.name + "' has an empty range");
        if (m.name == kCallAttempts || m.name == kDropRate || m.name == kMeanDuration)
            fail("metric name '" + m.name + "' is reserved for CDR aggregates");
    }
    std::set<std::string> labels;
    for (const auto& c : causes) {
        if (c.cause_label.empty() || !labels.insert(c.cause_label).second) fail("cause labels must be unique and nonempty");
        auto q = by_name.find(c.kqi);
        if (q == by_name.end() || q->second->kind != MetricKind::Kqi) fail("cause '" + c.cause_label + "' names unknown KQI");
        if (c.symptoms.empty()) fail("cause '" + c.cause_label + "' has no symptoms");
        for (const auto& s : c.symptoms) {
            auto k = by_name.find(s.metric_name);
            if (k == by_name.end() || k->second->kind != MetricKind::Kpi)
                fail("cause '" + c.cause_label + "' names unknown KPI '" + s.metric_name + "'");
        }
    }
    const auto cells = cell_ids();
    const std::int64_t test0 = test_start();
    const std::int64_t end = end_time();
    for (const auto& a : anomalies) {
        if (std::find(cells.begin(), cells.end(), a.cell_id) == cells.end()) fail("anomaly on unknown cell " + a.cell_id);
        auto q = by_name.find(a.kqi);
        if (q == by_name.end() || q->second->kind != MetricKind::Kqi) fail("anomaly on unknown KQI " + a.kqi);
        if (!(a.magnitude > 0.0)) fail("anomaly magnitude must be > 0");
        if (a.duration_windows < 1) fail("anomaly duration must be >= 1 window");
        if ((a.start - start_time) % window_len != 0) fail("anomaly start off the window grid");
        if (a.start < test0 || a.start + a.duration_windows * window_len > end)
            fail("planted anomaly on " + a.cell_id + " lies outside the test span");
        if (a.cause) {
            auto c = std::find_if(causes.begin(), causes.end(), [&](const auto& c) { return c.cause_label == *a.cause; });
            if (c == causes.end() || c->kqi != a.kqi) fail("anomaly cause '" + *a.cause + "' missing or for another KQI");
        }
    }
}

ScenarioSpec default_scenario(std::size_t n_anomalies) {
    ScenarioSpec s = base_spec();
    plan_anomalies(s, n_anomalies, kDefaultPlanSeed, 8.0);
    return s;
}

nlohmann::ordered_json spec_to_json(const ScenarioSpec& spec) {
    nlohmann::ordered_json doc;
    doc["kind"] = "scenario_spec";
    doc["n_cells"] = spec.n_cells;
    doc["days"] = spec.days;
    doc["window_len"] = spec.window_len;
    doc["start_time"] = spec.start_time;
    doc["train_fraction"] = spec.train_fraction;
    doc["seed"] = spec.seed;
    doc["missing_rate"] = spec.missing_rate;
    doc["corruption_rate"] = spec.corruption_rate;
    doc["symptom_magnitude"] = spec.symptom_magnitude;
    doc["cdr"] = {{"calls_per_window", spec.cdr_calls_per_window},
                  {"drop_probability", spec.cdr_drop_probability},
                  {"mean_duration", spec.cdr_mean_duration}};
    auto& metrics = doc["metrics"] = nlohmann::ordered_json::array();
    for (const auto& m : spec.metrics) {
        metrics.push_back({{"name", m.name},
                           {"kind", to_string(m.kind)},
                           {"polarity", to_string(m.polarity)},
                           {"hourly_mean", m.hourly_mean},
                           {"sigma", m.sigma},
                           {"range", {m.range.first, m.range.second}}});
    }
    auto& causes = doc["causes"] = nlohmann::ordered_json::array();
    for (const auto& c : spec.causes)
        causes.push_back({{"cause_label", c.cause_label}, {"symptoms", items_to_json(c.symptoms)}, {"kqi", c.kqi}});
    auto& anomalies = doc["anomalies"] = nlohmann::ordered_json::array();
    for (const auto& a : spec.anomalies) {
        nlohmann::ordered_json j{{"cell_id", a.cell_id},
                                 {"kqi", a.kqi},
                                 {"start", a.start},
                                 {"duration_windows", a.duration_windows},
                                 {"magnitude", a.magnitude}};
        j["cause"] = a.cause ? nlohmann::ordered_json(*a.cause) : nlohmann::ordered_json();
        anomalies.push_back(std::move(j));
    }
    doc["pipeline"] = spec.pipeline;
    doc["record_sizes"] = spec.record_sizes;
    return doc;
}

ScenarioSpec spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::InvalidSpec, "scenario spec must be a JSON object");
    ScenarioSpec s = base_spec();
    try {
        auto get = [&](const char* key, auto& out) {
            if (doc.contains(key)) out = doc.at(key).get<std::remove_reference_t<decltype(out)>>();
        };
        get("n_cells", s.n_cells);
        get("days", s.days);
        get("window_len", s.window_len);
        get("start_time", s.start_time);
        get("train_fraction", s.train_fraction);
        get("seed", s.seed);
        get("missing_rate", s.missing_rate);
        get("corruption_rate", s.corruption_rate);
        get("symptom_magnitude", s.symptom_magnitude);
        if (doc.contains("cdr")) {
            const auto& c = doc.at("cdr");
            if (c.contains("calls_per_window")) s.cdr_calls_per_window = c.at("calls_per_window").get<double>();
            if (c.contains("drop_probability")) s.cdr_drop_probability = c.at("drop_probability").get<double>();
            if (c.contains("mean_duration")) s.cdr_mean_duration = c.at("mean_duration").get<double>();
        }
        if (doc.contains("metrics")) {
            s.metrics.clear();
            s.causes.clear();
            for (const auto& m : doc.at("metrics")) {
                auto kind = parse_metric_kind(m.at("kind").get<std::string>());
                auto pol = parse_polarity(m.at("polarity").get<std::string>());
                auto name = m.at("name").get<std::string>();
                double sigma = m.at("sigma").get<double>();
                MetricGenerator g;
                if (m.contains("hourly_mean")) {
                    g.name = name;
                    g.kind = kind;
                    g.polarity = pol;
                    g.sigma = sigma;
                    g.hourly_mean = m.at("hourly_mean").get<std::array<double, 24>>();
                    auto [mn, mx] = std::minmax_element(g.hourly_mean.begin(), g.hourly_mean.end());
                    g.range = {*mn - 6.0 * sigma, *mx + 6.0 * sigma};
                } else {
                    g = diurnal(name, kind, pol, m.at("base").get<double>(), m.value("amplitude", 0.0), sigma);
                }
                if (m.contains("range")) g.range = {m.at("range").at(0).get<double>(), m.at("range").at(1).get<double>()};
                s.metrics.push_back(std::move(g));
            }
        }
        if (doc.contains("causes")) {
            s.causes.clear();
            for (const auto& c : doc.at("causes")) {
                auto items = items_from_json(c.at("symptoms"));
                canonicalize(items);
                s.causes.push_back({c.at("cause_label").get<std::string>(), std::move(items), c.at("kqi").get<std::string>()});
            }
        }
        if (doc.contains("pipeline")) s.pipeline = doc.at("pipeline");
        if (doc.contains("record_sizes")) s.record_sizes = doc.at("record_sizes");
        if (doc.contains("anomalies")) {
            for (const auto& a : doc.at("anomalies")) {
                PlannedAnomaly p;
                p.cell_id = a.at("cell_id").get<std::string>();
                p.kqi = a.at("kqi").get<std::string>();
                p.start = a.at("start").get<std::int64_t>();
                p.duration_windows = a.at("duration_windows").get<std::int64_t>();
                p.magnitude = a.at("magnitude").get<double>();
                if (a.contains("cause") && !a.at("cause").is_null()) p.cause = a.at("cause").get<std::string>();
                s.anomalies.push_back(std::move(p));
            }
        } else {
            plan_anomalies(s, doc.value("n_anomalies", std::size_t{12}), doc.value("plan_seed", kDefaultPlanSeed),
                           doc.value("magnitude", 8.0));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidConfig) throw Error(ErrorKind::InvalidSpec, e.what());
        throw;
    }
    s.validate();
    return s;
}

ScenarioSpec load_spec(const std::filesystem::path& path) {
    auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::InvalidSpec, "scenario spec is not valid JSON");
    return spec_from_json(doc);
}

// --- ground truth --------------------------------------------------------------

nlohmann::ordered_json truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json doc;
    doc["kind"] = "ground_truth";
    doc["test_start"] = truth.test_start;
    auto& events = doc["planted_events"] = nlohmann::ordered_json::array();
    for (const auto& e : truth.events)
        events.push_back({{"cell_id", e.cell_id},
                          {"kqi", e.kqi},
                          {"start_window", e.start_window},
                          {"end_window", e.end_window},
                          {"cause_label", e.cause_label}});
    auto& rules = doc["planted_rules"] = nlohmann::ordered_json::array();
    for (const auto& r : truth.rules)
        rules.push_back({{"antecedent", items_to_json(r.pattern)}, {"consequent", r.kqi}, {"cause_label", r.cause_label}});
    return doc;
}

GroundTruth truth_from_json(const nlohmann::json& doc) {
    GroundTruth t;
    try {
        t.test_start = doc.at("test_start").get<std::int64_t>();
        for (const auto& e : doc.at("planted_events"))
            t.events.push_back({e.at("cell_id").get<std::string>(), e.at("kqi").get<std::string>(),
                                e.at("start_window").get<std::int64_t>(), e.at("end_window").get<std::int64_t>(),
                                e.at("cause_label").get<std::string>()});
        for (const auto& r : doc.at("planted_rules"))
            t.rules.push_back({items_from_json(r.at("antecedent")), r.at("consequent").get<std::string>(),
                               r.at("cause_label").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("ground truth: ") + e.what());
    }
    return t;
}

// --- generation ------------------------------------------------------------------

GeneratedScenario generate(const ScenarioSpec& spec_in, std::uint64_t seed) {
    ScenarioSpec spec = spec_in;
    spec.seed = seed;
    spec.validate();

    GeneratedScenario out;
    out.catalog = spec.catalog();
    out.truth.test_start = spec.test_start();
    for (const auto& c : spec.causes) out.truth.rules.push_back({c.symptoms, c.kqi, c.cause_label});

    const std::size_t n_windows = spec.window_count();
    const auto n_train = static_cast<std::size_t>((spec.test_start() - spec.start_time) / spec.window_len);

    // (cell, metric) -> per-window shift in sigma units (sign included)
    std::map<std::pair<std::string, std::string>, std::vector<double>> shifts;
    auto add_shift = [&](const std::string& cell, const std::string& metric, std::size_t w0, std::int64_t len,
                         double units) {
        auto& v = shifts[{cell, metric}];
        if (v.empty()) v.assign(n_windows, 0.0);
        for (std::int64_t i = 0; i < len && w0 + static_cast<std::size_t>(i) < n_windows; ++i)
            v[w0 + static_cast<std::size_t>(i)] += units;
    };
    auto metric_by_name = [&](const std::string& name) -> const MetricGenerator& {
        return *std::find_if(spec.metrics.begin(), spec.metrics.end(), [&](const auto& m) { return m.name == name; });
    };

    Rng cause_rng(derive_seed(seed, "causes"));
    for (const auto& a : spec.anomalies) {
        const CausePattern* cause = nullptr;
        if (a.cause) {
            cause = &*std::find_if(spec.causes.begin(), spec.causes.end(),
                                   [&](const auto& c) { return c.cause_label == *a.cause; });
        } else {
            std::vector<const CausePattern*> options;
            for (const auto& c : spec.causes)
                if (c.kqi == a.kqi) options.push_back(&c);
            if (!options.empty()) cause = options[cause_rng.below(options.size())];
        }
        auto w0 = static_cast<std::size_t>((a.start - spec.start_time) / spec.window_len);
        double sign = metric_by_name(a.kqi).polarity == Polarity::HigherIsWorse ? 1.0 : -1.0;
        add_shift(a.cell_id, a.kqi, w0, a.duration_windows, sign * a.magnitude);
        if (cause) {
            for (const auto& s : cause->symptoms) {
                double dir = s.state == SymptomState::High ? 1.0 : -1.0;
                add_shift(a.cell_id, s.metric_name, w0, a.duration_windows, dir * spec.symptom_magnitude);
            }
        }
        out.truth.events.push_back({a.cell_id, a.kqi, a.start, a.start + (a.duration_windows - 1) * spec.window_len,
                                    cause ? cause->cause_label : std::string("none")});
    }

    for (const auto& cell : spec.cell_ids()) {
        Rng rng(derive_seed(seed, cell));
        for (const auto& m : spec.metrics) {
            MetricSeries s{cell, m.name, m.kind, m.polarity, spec.window_len, {}};
            s.points.reserve(n_windows);
            auto sh = shifts.find({cell, m.name});
            for (std::size_t w = 0; w < n_windows; ++w) {
                std::int64_t ws = spec.start_time + static_cast<std::int64_t>(w) * spec.window_len;
                double mean = m.hourly_mean[static_cast<std::size_t>(hour_bucket(ws))];
                double v = mean + m.sigma * rng.normal();
                for (int tries = 0; tries < 64 && (v < m.range.first || v > m.range.second); ++tries)
                    v = mean + m.sigma * rng.normal();
                v = std::clamp(v, m.range.first, m.range.second);
                double u_missing = rng.uniform();
                double u_corrupt = rng.uniform();
                double shift = sh != shifts.end() ? sh->second[w] : 0.0;
                bool planted = shift != 0.0;
                if (planted) {
                    // Fold the noise onto the shift so a planted value sits at
                    // least |shift| MAD-units from the true hourly median.
                    double dir = shift > 0.0 ? 1.0 : -1.0;
                    v = mean + dir * std::abs(v - mean) + shift * kMadUnit * m.sigma;
                }
                if (!planted && w < n_train && u_corrupt < spec.corruption_rate)
                    v = mean + (u_corrupt < spec.corruption_rate / 2 ? -1000.0 : 1000.0) * m.sigma;
                std::optional<double> value = round4(v);
                if (!planted && u_missing < spec.missing_rate) value.reset();
                s.points.push_back({ws, value});
            }
            (m.kind == MetricKind::Kqi ? out.data.kqi : out.data.kpi).push_back(std::move(s));
        }

        Rng cdr_rng(derive_seed(seed, cell + "/cdr"));
        std::vector<CdrRecord> calls;
        for (std::size_t w = 0; w < n_windows; ++w) {
            std::int64_t ws = spec.start_time + static_cast<std::int64_t>(w) * spec.window_len;
            auto n_calls = cdr_rng.poisson(spec.cdr_calls_per_window);
            for (std::uint64_t c = 0; c < n_calls; ++c) {
                CdrRecord r;
                r.cell_id = cell;
                r.start_time = ws + static_cast<std::int64_t>(cdr_rng.below(static_cast<std::uint64_t>(spec.window_len)));
                r.duration = std::round(cdr_rng.exponential(spec.cdr_mean_duration));
                r.dropped = cdr_rng.uniform() < spec.cdr_drop_probability;
                r.source_hash = hex64(cdr_rng.next());
                r.dest_hash = hex64(cdr_rng.next());
                calls.push_back(std::move(r));
            }
        }
        std::stable_sort(calls.begin(), calls.end(),
                         [](const CdrRecord& a, const CdrRecord& b) { return a.start_time < b.start_time; });
        out.data.cdr.insert(out.data.cdr.end(), std::make_move_iterator(calls.begin()),
                            std::make_move_iterator(calls.end()));
    }

    auto by_key = [](const MetricSeries& a, const MetricSeries& b) {
        return std::tie(a.cell_id, a.metric_name) < std::tie(b.cell_id, b.metric_name);
    };
    std::sort(out.data.kqi.begin(), out.data.kqi.end(), by_key);
    std::sort(out.data.kpi.begin(), out.data.kpi.end(), by_key);
    out.spec = std::move(spec);
    return out;
}

void write_scenario(const GeneratedScenario& scenario, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    write_file(dir / "cdr.csv", serialize_cdr(scenario.data.cdr));
    write_file(dir / "kqi.csv", serialize_metric_csv(scenario.data.kqi));
    write_file(dir / "kpi.csv", serialize_metric_csv(scenario.data.kpi));
    write_file(dir / "truth.json", truth_to_json(scenario.truth).dump(2) + "\n");
    write_file(dir / "catalog.json", catalog_to_json(scenario.catalog).dump(2) + "\n");
    write_file(dir / "spec.json", spec_to_json(scenario.spec).dump(2) + "\n");
    write_file(dir / "config.json", scenario.spec.pipeline.dump(2) + "\n");
}

// --- evaluation ------------------------------------------------------------------

nlohmann::ordered_json EvalReport::to_json() const {
    return {{"kind", "eval_report"},
            {"detected", detected},
            {"planted", planted},
            {"matched_detected", matched_detected},
            {"matched_planted", matched_planted},
            {"precision", precision},
            {"recall", recall},
            {"rca_evaluated", rca_evaluated},
            {"rca_correct", rca_correct},
            {"rca_top1_accuracy", rca_top1_accuracy}};
}

EvalReport evaluate(std::span<const AnomalyEvent> detected, std::span<const DiagnosedEvent> diagnoses,
                    const GroundTruth& truth) {
    auto overlaps = [](const AnomalyEvent& e, const PlantedEvent& p) {
        return e.cell_id == p.cell_id && e.metric_name == p.kqi && e.start_window <= p.end_window &&
               p.start_window <= e.end_window;
    };
    EvalReport r;
    r.detected = detected.size();
    r.planted = truth.events.size();
    std::vector<bool> planted_hit(truth.events.size(), false);
    for (const auto& e : detected) {
        const PlantedEvent* match = nullptr;
        for (std::size_t i = 0; i < truth.events.size(); ++i) {
            if (!overlaps(e, truth.events[i])) continue;
            planted_hit[i] = true;
            if (!match) match = &truth.events[i];
        }
        if (!match) continue;
        ++r.matched_detected;
        auto row = std::find_if(diagnoses.begin(), diagnoses.end(), [&](const auto& d) { return d.event == e; });
        if (row == diagnoses.end() || !row->diagnosis.matched) continue;
        ++r.rca_evaluated;
        if (row->diagnosis.ranked.front().cause_label == match->cause_label) ++r.rca_correct;
    }
    r.matched_planted = static_cast<std::size_t>(std::count(planted_hit.begin(), planted_hit.end(), true));
    if (r.detected) r.precision = static_cast<double>(r.matched_detected) / static_cast<double>(r.detected);
    if (r.planted) r.recall = static_cast<double>(r.matched_planted) / static_cast<double>(r.planted);
    if (r.rca_evaluated) r.rca_top1_accuracy = static_cast<double>(r.rca_correct) / static_cast<double>(r.rca_evaluated);
    return r;
}

}  // namespace fogdna
