// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsn::text {

std::string trim(std::string_view s);

// Splits on commas; no quoting (ids and labels never contain commas).
std::vector<std::string> split_csv_line(std::string_view line);

// Reads a comma-separated file, skipping blank lines and lines starting with
// '#'. Throws FileNotFound or IoFailure.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

// Writes atomically enough for our purposes: whole buffer, binary mode.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Whole-string parse (surrounding blanks allowed); nullopt on garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

} // namespace wsn::text
