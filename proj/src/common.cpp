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

#include "common.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fogdna {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::UnknownMetric: return "UnknownMetric";
        case ErrorKind::DuplicatePoint: return "DuplicatePoint";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::EmptyTraining: return "EmptyTraining";
        case ErrorKind::UnknownKey: return "UnknownKey";
        case ErrorKind::IncompatibleSketch: return "IncompatibleSketch";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::CorruptDb: return "CorruptDb";
        case ErrorKind::InvalidTopology: return "InvalidTopology";
        case ErrorKind::UnassignedCell: return "UnassignedCell";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::Usage: return "Usage";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::size_t> lines)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      lines_(std::move(lines)) {}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to '" + path.string() + "'");
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace fogdna
