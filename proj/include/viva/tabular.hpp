#pragma once

/**
 * @file tabular.hpp
 * @brief Typed in-memory tables: cell values, attribute descriptors, datasets
 * and the per-row time index used by every temporal query.
 *
 * Columns are stored as shared immutable vectors, so a derived dataset that
 * edits one attribute shares every other column with its base.
 */

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "viva/error.hpp"

namespace viva {

// ---------------------------------------------------------------------------
// Cell values
// ---------------------------------------------------------------------------

struct Missing {
    bool operator==(const Missing&) const = default;
};

struct Category {
    std::string value;
    bool operator==(const Category&) const = default;
};

struct Number {
    double value = 0.0;
    bool operator==(const Number&) const = default;
};

/// UTC, seconds since the Unix epoch.
struct Timestamp {
    std::int64_t seconds = 0;
    bool operator==(const Timestamp&) const = default;
};

struct ValueList {
    std::vector<std::string> values;
    bool operator==(const ValueList&) const = default;
};

struct Text {
    std::string value;
    bool operator==(const Text&) const = default;
};

using CellValue = std::variant<Missing, Category, Number, Timestamp, ValueList, Text>;
using Column = std::vector<CellValue>;
using ColumnPtr = std::shared_ptr<const Column>;

inline bool is_missing(const CellValue& v) { return std::holds_alternative<Missing>(v); }

/// Non-finite inputs are not representable and become Missing.
inline CellValue make_number(double v) {
    if (!std::isfinite(v)) return Missing{};
    return Number{v};
}

/// Drops empty elements and repeated elements (first occurrence wins).
inline CellValue make_list(std::vector<std::string> values) {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (auto& v : values) {
        if (v.empty()) continue;
        if (std::find(out.begin(), out.end(), v) != out.end()) continue;
        out.push_back(std::move(v));
    }
    if (out.empty()) return Missing{};
    return ValueList{std::move(out)};
}

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline constexpr std::string_view kNullLevel = "NULL";

/// Missing-value policy for categorical text: blanks and the usual null
/// spellings collapse onto the literal level "NULL".
inline CellValue normalize_level(std::string_view raw) {
    const auto t = trim(raw);
    if (t.empty() || t == "NULL" || t == "null" || t == "N/A") return Category{std::string(kNullLevel)};
    return Category{std::string(t)};
}

inline std::optional<double> parse_number(std::string_view raw) {
    const auto t = trim(raw);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------------------
// Dates
// ---------------------------------------------------------------------------

using Date = std::chrono::sys_days;

inline constexpr std::int32_t kNoDay = std::numeric_limits<std::int32_t>::min();

inline std::int32_t day_number(Date d) { return static_cast<std::int32_t>(d.time_since_epoch().count()); }
inline Date date_from_day(std::int32_t n) { return Date{std::chrono::days{n}}; }

inline std::int32_t day_of_timestamp(std::int64_t seconds) {
    auto d = seconds / 86400;
    if (seconds % 86400 < 0) --d;
    return static_cast<std::int32_t>(d);
}

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc() && ptr == s.data() + pos + len;
}

} // namespace detail

/// Accepts `YYYY-MM-DD`.
inline std::optional<Date> parse_date(std::string_view raw) {
    const auto s = trim(raw);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!detail::read_int(s, 0, 4, y) || !detail::read_int(s, 5, 2, m) || !detail::read_int(s, 8, 2, d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DD HH:MM[:SS]` and the ISO `T` separator
/// with an optional trailing `Z`. Everything is interpreted as UTC.
inline std::optional<std::int64_t> parse_timestamp(std::string_view raw) {
    auto s = trim(raw);
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    if (s.size() < 10) return std::nullopt;
    const auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    std::int64_t secs = static_cast<std::int64_t>(day_number(*date)) * 86400;
    if (s.size() == 10) return secs;
    if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
    const auto tod = s.substr(11);
    int hh = 0, mm = 0, ss = 0;
    if (tod.size() != 5 && tod.size() != 8) return std::nullopt;
    if (!detail::read_int(tod, 0, 2, hh) || tod[2] != ':' || !detail::read_int(tod, 3, 2, mm)) return std::nullopt;
    if (tod.size() == 8 && (tod[5] != ':' || !detail::read_int(tod, 6, 2, ss))) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return secs + hh * 3600 + mm * 60 + ss;
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::string format_timestamp(std::int64_t seconds) {
    const auto day = day_of_timestamp(seconds);
    const auto tod = seconds - static_cast<std::int64_t>(day) * 86400;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d:%02d", format_date(date_from_day(day)).c_str(),
                  static_cast<int>(tod / 3600), static_cast<int>((tod / 60) % 60), static_cast<int>(tod % 60));
    return buf;
}

/// Inclusive date interval; filtering covers [start 00:00:00, end 23:59:59].
class TimeRange {
public:
    TimeRange(Date start, Date end) : start_(start), end_(end) {
        if (end_ < start_) fail(ErrorCode::InvalidRange, "time range start is after end");
    }

    Date start() const { return start_; }
    Date end() const { return end_; }
    std::int32_t first_day() const { return day_number(start_); }
    std::int32_t last_day() const { return day_number(end_); }
    bool contains_day(std::int32_t day) const { return day != kNoDay && day >= first_day() && day <= last_day(); }

    bool operator==(const TimeRange&) const = default;

private:
    Date start_;
    Date end_;
};

// ---------------------------------------------------------------------------
// Attributes
// ---------------------------------------------------------------------------

enum class AttributeKind { categorical, ordered, quantitative, datetime, list, freeform };
enum class Origin { original, derived };

inline std::string_view to_string(AttributeKind k) {
    switch (k) {
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::ordered: return "ordered";
    case AttributeKind::quantitative: return "quantitative";
    case AttributeKind::datetime: return "datetime";
    case AttributeKind::list: return "list";
    case AttributeKind::freeform: return "freeform";
    }
    return "freeform";
}

inline std::string_view to_string(Origin o) { return o == Origin::original ? "original" : "derived"; }

inline bool has_levels(AttributeKind k) {
    return k == AttributeKind::categorical || k == AttributeKind::ordered || k == AttributeKind::list;
}

inline bool is_stratifiable(AttributeKind k) { return k == AttributeKind::categorical || k == AttributeKind::ordered; }

struct AttributeDef {
    std::string id;
    std::string name;
    AttributeKind kind = AttributeKind::categorical;
    std::optional<std::string> units;
    std::vector<std::string> levels;
    Origin origin = Origin::original;
    std::string dataset_id;
    bool chartable = true;
    /// Schema name of the original attribute this one descends from. Specified
    /// color and ordering rules are keyed on it, so copies keep their styling.
    std::string config_name;

    /// Identifier of the original ancestor (stable across renames).
    std::string root_id() const { return dataset_id + "." + config_name; }

    bool operator==(const AttributeDef&) const = default;
};

/// Levels observed in a column, in order of first appearance.
inline std::vector<std::string> observed_levels(const Column& column) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    auto add = [&](const std::string& s) {
        if (seen.insert(s).second) out.push_back(s);
    };
    for (const auto& cell : column) {
        if (const auto* c = std::get_if<Category>(&cell)) add(c->value);
        else if (const auto* l = std::get_if<ValueList>(&cell))
            for (const auto& v : l->values) add(v);
    }
    return out;
}

/// Per-level counts over a whole column; list cells count each element once.
inline std::unordered_map<std::string, std::size_t> level_counts(const Column& column) {
    std::unordered_map<std::string, std::size_t> out;
    for (const auto& cell : column) {
        if (const auto* c = std::get_if<Category>(&cell)) ++out[c->value];
        else if (const auto* l = std::get_if<ValueList>(&cell))
            for (const auto& v : l->values) ++out[v];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// A table with one designated datetime attribute. Values are treated as
/// immutable once shared; the engine edits its own copies through the
/// mutators, which only swap column pointers.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::string id, std::string name, std::vector<AttributeDef> attributes, std::vector<ColumnPtr> columns,
            std::string time_attribute)
        : id_(std::move(id)), name_(std::move(name)), attributes_(std::move(attributes)), columns_(std::move(columns)),
          time_attribute_(std::move(time_attribute)) {
        if (attributes_.size() != columns_.size())
            fail(ErrorCode::InvalidParams, "dataset " + id_ + ": attribute/column count mismatch");
        row_count_ = columns_.empty() ? 0 : columns_.front()->size();
        for (const auto& c : columns_)
            if (c->size() != row_count_) fail(ErrorCode::MalformedCsv, "dataset " + id_ + ": ragged columns");
        const auto t = find(time_attribute_);
        if (!t || attributes_[*t].kind != AttributeKind::datetime)
            fail(ErrorCode::NoTimeAttribute, "dataset " + id_ + " has no datetime time attribute");
        auto days = std::make_shared<std::vector<std::int32_t>>(row_count_, kNoDay);
        const auto& tc = *columns_[*t];
        for (std::size_t r = 0; r < row_count_; ++r)
            if (const auto* ts = std::get_if<Timestamp>(&tc[r])) (*days)[r] = day_of_timestamp(ts->seconds);
        days_ = std::move(days);
    }

    const std::string& id() const { return id_; }
    const std::string& name() const { return name_; }
    const std::vector<AttributeDef>& attributes() const { return attributes_; }
    const std::string& time_attribute() const { return time_attribute_; }
    std::size_t row_count() const { return row_count_; }

    /// Day number of each row's timestamp, kNoDay where Missing.
    const std::vector<std::int32_t>& row_days() const { return *days_; }

    std::optional<std::size_t> find(std::string_view attribute_id) const {
        for (std::size_t i = 0; i < attributes_.size(); ++i)
            if (attributes_[i].id == attribute_id) return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view attribute_id) const {
        if (auto i = find(attribute_id)) return *i;
        fail(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(attribute_id) + "' in dataset " + id_,
             {{"attribute_id", attribute_id}});
    }

    bool has_attribute_name(std::string_view name) const {
        return std::any_of(attributes_.begin(), attributes_.end(), [&](const auto& a) { return a.name == name; });
    }

    const AttributeDef& attribute(std::string_view attribute_id) const { return attributes_[index_of(attribute_id)]; }
    const AttributeDef& attribute_at(std::size_t i) const { return attributes_[i]; }
    const Column& column(std::string_view attribute_id) const { return *columns_[index_of(attribute_id)]; }
    const Column& column_at(std::size_t i) const { return *columns_[i]; }
    const ColumnPtr& column_ptr(std::size_t i) const { return columns_[i]; }

    std::vector<CellValue> row(std::size_t r) const {
        std::vector<CellValue> out;
        out.reserve(columns_.size());
        for (const auto& c : columns_) out.push_back((*c)[r]);
        return out;
    }

    /// Earliest and latest row day, if any row carries a timestamp.
    std::optional<std::pair<std::int32_t, std::int32_t>> day_extent() const {
        std::optional<std::pair<std::int32_t, std::int32_t>> out;
        for (auto d : *days_) {
            if (d == kNoDay) continue;
            if (!out) out.emplace(d, d);
            else {
                out->first = std::min(out->first, d);
                out->second = std::max(out->second, d);
            }
        }
        return out;
    }

    // Mutators used by the operation engine on derived copies.
    void replace(std::size_t i, AttributeDef def, ColumnPtr column) {
        check_column(*column);
        attributes_[i] = std::move(def);
        columns_[i] = std::move(column);
    }

    void insert(std::size_t pos, AttributeDef def, ColumnPtr column) {
        check_column(*column);
        attributes_.insert(attributes_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(def));
        columns_.insert(columns_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(column));
    }

    AttributeDef& mutable_attribute(std::size_t i) { return attributes_[i]; }

private:
    void check_column(const Column& c) const {
        if (c.size() != row_count_) fail(ErrorCode::InvalidParams, "column length does not match dataset " + id_);
    }

    std::string id_;
    std::string name_;
    std::vector<AttributeDef> attributes_;
    std::vector<ColumnPtr> columns_;
    std::string time_attribute_;
    std::size_t row_count_ = 0;
    std::shared_ptr<const std::vector<std::int32_t>> days_ = std::make_shared<std::vector<std::int32_t>>();
};

/// Cells of `attribute_id` for rows whose timestamp falls within `range`,
/// in row order. Rows without a timestamp are excluded.
inline std::vector<CellValue> column_values(const Dataset& dataset, std::string_view attribute_id,
                                            const TimeRange& range) {
    const auto& col = dataset.column(attribute_id);
    const auto& days = dataset.row_days();
    std::vector<CellValue> out;
    for (std::size_t r = 0; r < col.size(); ++r)
        if (range.contains_day(days[r])) out.push_back(col[r]);
    return out;
}

// ---------------------------------------------------------------------------
// Fingerprints
// ---------------------------------------------------------------------------

/// Streaming FNV-1a, used for byte-level equality checks of whole states.
class Fingerprint {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void str(std::string_view s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { bytes(&v, sizeof v); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline void hash_cell(Fingerprint& fp, const CellValue& cell) {
    fp.u64(cell.index());
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Category> || std::is_same_v<T, Text>) fp.str(v.value);
            else if constexpr (std::is_same_v<T, Number>) fp.f64(v.value);
            else if constexpr (std::is_same_v<T, Timestamp>) fp.u64(static_cast<std::uint64_t>(v.seconds));
            else if constexpr (std::is_same_v<T, ValueList>) {
                fp.u64(v.values.size());
                for (const auto& s : v.values) fp.str(s);
            }
        },
        cell);
}

inline void hash_attribute(Fingerprint& fp, const AttributeDef& a) {
    fp.str(a.id);
    fp.str(a.name);
    fp.str(to_string(a.kind));
    fp.str(a.units.value_or("\x01"));
    fp.u64(a.levels.size());
    for (const auto& l : a.levels) fp.str(l);
    fp.str(to_string(a.origin));
    fp.str(a.dataset_id);
    fp.u64(a.chartable);
    fp.str(a.config_name);
}

inline std::uint64_t column_fingerprint(const Column& column) {
    Fingerprint fp;
    fp.u64(column.size());
    for (const auto& c : column) hash_cell(fp, c);
    return fp.value();
}

inline std::uint64_t fingerprint(const Dataset& d) {
    Fingerprint fp;
    fp.str(d.id());
    fp.str(d.name());
    fp.str(d.time_attribute());
    fp.u64(d.row_count());
    for (std::size_t i = 0; i < d.attributes().size(); ++i) {
        hash_attribute(fp, d.attribute_at(i));
        fp.u64(column_fingerprint(d.column_at(i)));
    }
    return fp.value();
}

} // namespace viva
