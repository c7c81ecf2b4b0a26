// SPDX-License-Identifier: Apache-2.0

#include "wsn/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "wsn/error.hpp"

namespace wsn::text {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

std::string read_file(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw Error(ErrorCode::FileNotFound, "no such file", "path", path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open file", "path", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open file for writing", "path", path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorCode::IoFailure, "write failed", "path", path.string());
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path)
{
    const std::string data = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(data);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        rows.push_back(split_csv_line(t));
    }
    return rows;
}

std::optional<double> parse_double(std::string_view s)
{
    const std::string t = trim(s);
    if (t.empty())
        return std::nullopt;
    const char* begin = t.data();
    if (*begin == '+')
        ++begin;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view s)
{
    const std::string t = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        return std::nullopt;
    return v;
}

} // namespace wsn::text
