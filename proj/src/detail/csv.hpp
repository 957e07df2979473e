// Copyright 2026 The uwloc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! \file detail/csv.hpp
//! Minimal numeric CSV reader shared by the profile and measurement formats.

#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "uwloc/errors.hpp"

namespace uwloc::detail {

struct CsvRow
{
    std::size_t line;
    std::vector<double> values;
};

inline std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return value;
}

//! Parse rows of exactly `columns` numeric fields. The first non-blank row is
//! treated as a header when it is not numeric. Handles LF/CRLF and a UTF-8 BOM.
inline std::vector<CsvRow>
read_numeric_csv(std::istream& is, std::size_t columns, std::string_view what)
{
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t lineno = 0;
    bool seen_first = false;
    while (std::getline(is, line))
    {
        ++lineno;
        std::string_view view = line;
        if (lineno == 1 && view.starts_with("\xEF\xBB\xBF"))
            view.remove_prefix(3);
        view = trim(view);
        if (view.empty())
            continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true)
        {
            auto comma = view.find(',', start);
            fields.push_back(view.substr(start, comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }

        CsvRow row{lineno, {}};
        bool numeric = fields.size() == columns;
        for (auto f : fields)
        {
            auto v = parse_double(f);
            if (!v)
            {
                numeric = false;
                break;
            }
            row.values.push_back(*v);
        }

        if (!seen_first)
        {
            seen_first = true;
            if (!numeric && fields.size() == columns)
                continue;  // header
        }
        if (!numeric)
        {
            throw Error(ErrorCode::parse_error,
                        fmt::format("{}: malformed row {} (expected {} numeric "
                                    "columns): '{}'",
                                    what,
                                    lineno,
                                    columns,
                                    view));
        }
        rows.push_back(std::move(row));
    }
    if (is.bad())
    {
        throw Error(ErrorCode::io_error, fmt::format("{}: read failed", what));
    }
    return rows;
}

}  // namespace uwloc::detail
