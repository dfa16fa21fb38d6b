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

#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "common.hpp"

namespace fogdna {

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

// Iterates over '\n'-separated lines, dropping one trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
    auto lines = split_fields(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string join_lines(const std::vector<std::size_t>& lines) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < lines.size() && i < 10; ++i) ss << (i ? ", " : "") << lines[i];
    if (lines.size() > 10) ss << ", ... (" << lines.size() << " rows)";
    return ss.str();
}

}  // namespace

std::string to_string(MetricKind kind) { return kind == MetricKind::Kqi ? "KQI" : "KPI"; }

std::string to_string(Polarity polarity) {
    return polarity == Polarity::HigherIsWorse ? "HIGHER_IS_WORSE" : "LOWER_IS_WORSE";
}

MetricKind parse_metric_kind(std::string_view text) {
    if (text == "KQI") return MetricKind::Kqi;
    if (text == "KPI") return MetricKind::Kpi;
    throw Error(ErrorKind::InvalidConfig, "unknown metric kind '" + std::string(text) + "'");
}

Polarity parse_polarity(std::string_view text) {
    if (text == "HIGHER_IS_WORSE") return Polarity::HigherIsWorse;
    if (text == "LOWER_IS_WORSE") return Polarity::LowerIsWorse;
    throw Error(ErrorKind::InvalidConfig, "unknown polarity '" + std::string(text) + "'");
}

std::size_t MetricSeries::present_count() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const auto& p) { return p.value.has_value(); }));
}

nlohmann::ordered_json catalog_to_json(const MetricCatalog& catalog) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [name, info] : catalog) {
        nlohmann::ordered_json entry;
        entry["kind"] = to_string(info.kind);
        entry["polarity"] = to_string(info.polarity);
        entry["window_len_seconds"] = info.window_len;
        if (info.range) entry["range"] = {info.range->first, info.range->second};
        doc[name] = std::move(entry);
    }
    return doc;
}

MetricCatalog catalog_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "catalog must be a JSON object");
    MetricCatalog catalog;
    try {
        for (const auto& [name, entry] : doc.items()) {
            MetricInfo info;
            info.kind = parse_metric_kind(entry.at("kind").get<std::string>());
            info.polarity = parse_polarity(entry.at("polarity").get<std::string>());
            info.window_len = entry.at("window_len_seconds").get<std::int64_t>();
            if (info.window_len <= 0)
                throw Error(ErrorKind::InvalidConfig, "metric '" + name + "' has window_len <= 0");
            if (entry.contains("range")) {
                const auto& r = entry.at("range");
                double lo = r.at(0).get<double>();
                double hi = r.at(1).get<double>();
                if (!(lo < hi))
                    throw Error(ErrorKind::InvalidConfig, "metric '" + name + "' has empty range");
                info.range = std::make_pair(lo, hi);
            }
            catalog.emplace(name, info);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("catalog: ") + e.what());
    }
    return catalog;
}

MetricCatalog load_catalog(const std::filesystem::path& path) {
    auto text = read_file(path);
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::InvalidConfig, "catalog is not valid JSON: " + path.string());
    return catalog_from_json(doc);
}

std::vector<CdrRecord> parse_cdr(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines.front() != kCdrHeader)
        throw Error(ErrorKind::MalformedHeader, "expected header '" + std::string(kCdrHeader) + "'");

    std::vector<CdrRecord> records;
    records.reserve(lines.size() - 1);
    std::vector<std::size_t> bad;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i], ',');
        CdrRecord rec;
        bool ok = fields.size() == 6 && !fields[0].empty() &&
                  parse_number(fields[1], rec.start_time) && parse_number(fields[2], rec.duration) &&
                  std::isfinite(rec.duration) && rec.duration >= 0.0 &&
                  (fields[3] == "0" || fields[3] == "1");
        if (!ok) {
            bad.push_back(i + 1);
            continue;
        }
        rec.cell_id = std::string(fields[0]);
        rec.dropped = fields[3] == "1";
        rec.source_hash = std::string(fields[4]);
        rec.dest_hash = std::string(fields[5]);
        records.push_back(std::move(rec));
    }
    if (!bad.empty()) throw Error(ErrorKind::MalformedRow, "bad CDR rows at line(s) " + join_lines(bad), bad);
    return records;
}

std::vector<CdrRecord> load_cdr(const std::filesystem::path& path) {
    return parse_cdr(std::string_view(read_file(path)));
}

std::string serialize_cdr(std::span<const CdrRecord> records) {
    std::string out(kCdrHeader);
    out += '\n';
    for (const auto& r : records) {
        out += r.cell_id;
        out += ',';
        out += std::to_string(r.start_time);
        out += ',';
        out += format_double(r.duration);
        out += r.dropped ? ",1," : ",0,";
        out += r.source_hash;
        out += ',';
        out += r.dest_hash;
        out += '\n';
    }
    return out;
}

std::vector<MetricSeries> parse_metric_csv(std::string_view text, MetricKind kind,
                                           const MetricCatalog& catalog) {
    auto lines = split_lines(text);
    if (lines.empty() || lines.front() != kMetricHeader)
        throw Error(ErrorKind::MalformedHeader, "expected header '" + std::string(kMetricHeader) + "'");

    // (cell, metric) -> window_start -> value
    std::map<std::pair<std::string, std::string>, std::map<std::int64_t, std::optional<double>>> groups;
    std::vector<std::size_t> bad;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i], ',');
        std::int64_t ws = 0;
        if (fields.size() != 4 || fields[0].empty() || !parse_number(fields[2], ws)) {
            bad.push_back(i + 1);
            continue;
        }
        std::optional<double> value;
        if (!fields[3].empty()) {
            double v = 0.0;
            if (!parse_number(fields[3], v) || !std::isfinite(v)) {
                bad.push_back(i + 1);
                continue;
            }
            value = v;
        }
        std::string metric(fields[1]);
        auto it = catalog.find(metric);
        if (it == catalog.end()) throw Error(ErrorKind::UnknownMetric, metric);
        if (it->second.kind != kind)
            throw Error(ErrorKind::UnknownMetric, metric + " is not a " + to_string(kind));
        if (ws % it->second.window_len != 0) {
            bad.push_back(i + 1);
            continue;
        }
        auto& group = groups[{std::string(fields[0]), metric}];
        if (!group.emplace(ws, value).second)
            throw Error(ErrorKind::DuplicatePoint,
                        std::string(fields[0]) + "/" + metric + "/" + std::to_string(ws));
    }
    if (!bad.empty()) throw Error(ErrorKind::MalformedRow, "bad metric rows at line(s) " + join_lines(bad), bad);

    std::vector<MetricSeries> out;
    out.reserve(groups.size());
    for (auto& [key, points] : groups) {
        const auto& info = catalog.at(key.second);
        MetricSeries s;
        s.cell_id = key.first;
        s.metric_name = key.second;
        s.kind = info.kind;
        s.polarity = info.polarity;
        s.window_len = info.window_len;
        std::int64_t first = points.begin()->first;
        std::int64_t last = points.rbegin()->first;
        s.points.reserve(static_cast<std::size_t>((last - first) / info.window_len + 1));
        auto it = points.begin();
        for (std::int64_t ws = first; ws <= last; ws += info.window_len) {
            if (it != points.end() && it->first == ws) {
                s.points.push_back({ws, it->second});
                ++it;
            } else {
                s.points.push_back({ws, std::nullopt});
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<MetricSeries> load_metric_csv(const std::filesystem::path& path, MetricKind kind,
                                           const MetricCatalog& catalog) {
    return parse_metric_csv(std::string_view(read_file(path)), kind, catalog);
}

std::string serialize_metric_csv(std::span<const MetricSeries> series) {
    std::string out(kMetricHeader);
    out += '\n';
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            out += s.cell_id;
            out += ',';
            out += s.metric_name;
            out += ',';
            out += std::to_string(p.window_start);
            out += ',';
            if (p.value) out += format_double(*p.value);
            out += '\n';
        }
    }
    return out;
}

std::vector<MetricSeries> aggregate_cdr(std::span<const CdrRecord> records, std::int64_t window_len) {
    if (window_len <= 0) throw Error(ErrorKind::InvalidConfig, "aggregate_cdr: window_len must be > 0");

    struct Bucket {
        std::size_t attempts = 0;
        std::size_t dropped = 0;
        std::vector<double> durations;
    };
    std::map<std::string, std::map<std::int64_t, Bucket>> cells;
    for (const auto& r : records) {
        auto& b = cells[r.cell_id][floor_div(r.start_time, window_len) * window_len];
        ++b.attempts;
        if (r.dropped) ++b.dropped;
        b.durations.push_back(r.duration);
    }

    std::vector<MetricSeries> out;
    for (auto& [cell, windows] : cells) {
        MetricSeries attempts{cell, std::string(kCallAttempts), MetricKind::Kqi, Polarity::LowerIsWorse,
                              window_len, {}};
        MetricSeries drops{cell, std::string(kDropRate), MetricKind::Kqi, Polarity::HigherIsWorse,
                           window_len, {}};
        MetricSeries durations{cell, std::string(kMeanDuration), MetricKind::Kqi, Polarity::LowerIsWorse,
                               window_len, {}};
        std::int64_t first = windows.begin()->first;
        std::int64_t last = windows.rbegin()->first;
        for (std::int64_t ws = first; ws <= last; ws += window_len) {
            auto it = windows.find(ws);
            if (it == windows.end()) {
                attempts.points.push_back({ws, 0.0});
                drops.points.push_back({ws, std::nullopt});
                durations.points.push_back({ws, std::nullopt});
                continue;
            }
            auto& b = it->second;
            // Sorted summation keeps the result independent of record order.
            std::sort(b.durations.begin(), b.durations.end());
            double total = 0.0;
            for (double d : b.durations) total += d;
            double n = static_cast<double>(b.attempts);
            attempts.points.push_back({ws, n});
            drops.points.push_back({ws, static_cast<double>(b.dropped) / n});
            durations.points.push_back({ws, total / n});
        }
        out.push_back(std::move(attempts));
        out.push_back(std::move(drops));
        out.push_back(std::move(durations));
    }
    return out;
}

}  // namespace fogdna
