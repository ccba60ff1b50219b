#pragma once

// Data ingestion for delimited text with a header row, including the
// monthly-mean aggregation used for river-gauge series, plus deterministic
// numeric formatting for every emitted file (reruns must be byte-identical).

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavemix {

// Shortest round-trip-exact decimal form; stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lg", &back);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lg", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

struct IngestedSeries {
    std::vector<double> values;
    std::vector<std::string> labels;  // dates or month keys when available
};

enum class Aggregation { none, monthly_mean };

enum class DateFormat { iso, dmy };

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) fields.push_back(field);
    if (!line.empty() && line.back() == delim) fields.emplace_back();
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool is_missing(const std::string& field) {
    const std::string t = trim(field);
    return t.empty() || t == "NA" || t == "NaN" || t == "nan";
}

inline double parse_value(const std::string& field, std::size_t line_no) {
    const std::string t = trim(field);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse value '" +
                                 t + "'");
    }
}

// Returns year*12 + (month-1); validates the month.
inline long parse_month_key(const std::string& field, DateFormat fmt, std::size_t line_no) {
    const std::string t = trim(field);
    long year = 0, month = 0;
    auto fail = [&]() -> long {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse date '" + t +
                                 "'");
    };
    if (fmt == DateFormat::iso) {
        // YYYY-MM or YYYY-MM-DD
        if (t.size() < 7 || t[4] != '-') return fail();
        try {
            year = std::stol(t.substr(0, 4));
            month = std::stol(t.substr(5, 2));
        } catch (const std::exception&) {
            return fail();
        }
    } else {
        // DD/MM/YYYY (day may be one digit)
        const std::size_t s1 = t.find('/');
        const std::size_t s2 = t.find('/', s1 == std::string::npos ? s1 : s1 + 1);
        if (s1 == std::string::npos || s2 == std::string::npos) return fail();
        try {
            month = std::stol(t.substr(s1 + 1, s2 - s1 - 1));
            year = std::stol(t.substr(s2 + 1));
        } catch (const std::exception&) {
            return fail();
        }
    }
    if (month < 1 || month > 12) return fail();
    return year * 12 + (month - 1);
}

inline std::string month_key_to_label(long key) {
    const long year = key / 12;
    const long month = key % 12 + 1;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04ld-%02ld", year, month);
    return buf;
}

inline std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                                const std::string& path) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == name) return i;
    throw std::runtime_error(path + ": no column named '" + name + "' in header");
}

}  // namespace detail

// Read one numeric column, in time order. monthly_mean groups rows by
// calendar month and averages; missing values inside a month are skipped,
// months with no usable value (or absent from an otherwise contiguous
// record) are an error.
inline IngestedSeries ingest_series(const std::string& path, const std::string& value_column,
                                    const std::optional<std::string>& date_column = std::nullopt,
                                    Aggregation aggregate = Aggregation::none,
                                    DateFormat date_format = DateFormat::iso,
                                    char delimiter = ',') {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::vector<std::string> header = detail::split_line(line, delimiter);
    const std::size_t value_idx = detail::column_index(header, value_column, path);
    std::size_t date_idx = 0;
    const bool want_dates = date_column.has_value();
    if (aggregate == Aggregation::monthly_mean && !want_dates)
        throw std::runtime_error("monthly_mean aggregation requires a date column");
    if (want_dates) date_idx = detail::column_index(header, *date_column, path);

    IngestedSeries out;
    std::map<long, std::pair<double, std::size_t>> months;  // key -> (sum, count)
    std::map<long, bool> seen;                              // months present in the file at all
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> fields = detail::split_line(line, delimiter);
        if (value_idx >= fields.size() || (want_dates && date_idx >= fields.size()))
            throw std::runtime_error("line " + std::to_string(line_no) + ": too few fields");
        if (aggregate == Aggregation::monthly_mean) {
            const long key = detail::parse_month_key(fields[date_idx], date_format, line_no);
            seen[key] = true;
            if (detail::is_missing(fields[value_idx])) continue;
            const double v = detail::parse_value(fields[value_idx], line_no);
            auto& slot = months[key];
            slot.first += v;
            slot.second += 1;
        } else {
            if (detail::is_missing(fields[value_idx]))
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": missing value (no aggregation rule applies)");
            out.values.push_back(detail::parse_value(fields[value_idx], line_no));
            out.labels.push_back(want_dates ? detail::trim(fields[date_idx])
                                            : std::to_string(out.values.size()));
        }
    }

    if (aggregate == Aggregation::monthly_mean) {
        if (seen.empty()) throw std::runtime_error(path + ": no data rows");
        for (long key = seen.begin()->first; key <= seen.rbegin()->first; ++key) {
            const auto it = months.find(key);
            if (it == months.end() || it->second.second == 0)
                throw std::runtime_error(path + ": month " + detail::month_key_to_label(key) +
                                         " has no usable value");
            out.values.push_back(it->second.first / static_cast<double>(it->second.second));
            out.labels.push_back(detail::month_key_to_label(key));
        }
    }
    if (out.values.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

}  // namespace wavemix
