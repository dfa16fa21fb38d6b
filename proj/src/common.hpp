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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fogdna {

enum class ErrorKind {
    // ingest
    MalformedHeader,
    MalformedRow,
    UnknownMetric,
    DuplicatePoint,
    // cleaning
    TooFewPoints,
    // baseline
    EmptyTraining,
    UnknownKey,
    IncompatibleSketch,
    // fingerprint db
    SchemaMismatch,
    CorruptDb,
    // fogsim / synth
    InvalidTopology,
    UnassignedCell,
    InvalidSpec,
    // configuration and environment
    InvalidConfig,
    Usage,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Usage, configuration and IO failures are problems with the invocation;
// everything else is a property of the data being processed.
constexpr bool is_domain_error(ErrorKind kind) {
    return kind != ErrorKind::Usage && kind != ErrorKind::Io && kind != ErrorKind::InvalidConfig;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    Error(ErrorKind kind, const std::string& message, std::vector<std::size_t> lines);

    ErrorKind kind() const noexcept { return kind_; }

    // 1-based line numbers of offending rows (MalformedRow only).
    const std::vector<std::size_t>& lines() const noexcept { return lines_; }

private:
    ErrorKind kind_;
    std::vector<std::size_t> lines_;
};

// Floor division for possibly negative epoch seconds.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

}  // namespace fogdna
