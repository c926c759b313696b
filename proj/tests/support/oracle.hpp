#pragma once

// Brute-force reference implementations. Everything here walks rows one at
// a time and compares raw timestamps against the range bounds in seconds;
// nothing reuses the day index or the aggregation code.

#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "viva/analytics.hpp"

namespace vt::oracle {

using namespace std::chrono;

struct Rows {
    const viva::Dataset& ds;
    std::size_t time_col;

    explicit Rows(const viva::Dataset& d) : ds(d), time_col(d.index_of(d.time_attribute())) {}

    std::optional<long long> seconds(std::size_t r) const {
        if (const auto* t = std::get_if<viva::Timestamp>(&ds.column_at(time_col)[r])) return t->seconds;
        return std::nullopt;
    }

    bool in(std::size_t r, const viva::TimeRange& range) const {
        const auto s = seconds(r);
        if (!s) return false;
        const long long lo = static_cast<long long>(range.start().time_since_epoch().count()) * 86400;
        const long long hi = static_cast<long long>(range.end().time_since_epoch().count()) * 86400 + 86399;
        return *s >= lo && *s <= hi;
    }

    const viva::CellValue& cell(std::size_t r, std::string_view attr) const { return ds.column(attr)[r]; }
};

inline std::vector<std::string> levels_in(const viva::CellValue& c) {
    if (const auto* x = std::get_if<viva::Category>(&c)) return {x->value};
    if (const auto* l = std::get_if<viva::ValueList>(&c)) return l->values;
    return {};
}

inline std::optional<std::string> single(const viva::CellValue& c) {
    if (const auto* x = std::get_if<viva::Category>(&c)) return x->value;
    return std::nullopt;
}

inline std::map<std::string, long long> rollup(const viva::Dataset& ds, std::string_view attr,
                                               const viva::TimeRange& range) {
    Rows rows(ds);
    std::map<std::string, long long> out;
    for (const auto& l : ds.attribute(attr).levels) out[l] = 0;
    for (std::size_t r = 0; r < ds.row_count(); ++r)
        if (rows.in(r, range))
            for (const auto& l : levels_in(rows.cell(r, attr))) ++out[l];
    return out;
}

inline std::vector<double> numbers(const viva::Dataset& ds, std::string_view attr, const viva::TimeRange& range) {
    Rows rows(ds);
    std::vector<double> out;
    for (std::size_t r = 0; r < ds.row_count(); ++r)
        if (rows.in(r, range))
            if (const auto* n = std::get_if<viva::Number>(&rows.cell(r, attr))) out.push_back(n->value);
    return out;
}

/// Smallest 1/2/5 x 10^k at or above raw, by exhaustive search.
inline double nice_step(double raw) {
    double best = INFINITY;
    for (int k = -12; k <= 12; ++k)
        for (double m : {1.0, 2.0, 5.0}) {
            const double s = m * std::pow(10.0, k);
            if (s >= raw * (1 - 1e-12) && s < best) best = s;
        }
    return best;
}

inline std::map<std::pair<std::string, std::string>, long long> pairs(const viva::Dataset& ds, std::string_view a,
                                                                      std::string_view b, const viva::TimeRange& range) {
    Rows rows(ds);
    std::map<std::pair<std::string, std::string>, long long> out;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (!rows.in(r, range)) continue;
        const auto x = single(rows.cell(r, a));
        const auto y = single(rows.cell(r, b));
        if (x && y) ++out[{*x, *y}];
    }
    return out;
}

inline sys_days bucket_of(sys_days d, viva::Granularity g) {
    switch (g) {
    case viva::Granularity::day: return d;
    case viva::Granularity::week: {
        const weekday wd{d};
        return d - days{(wd.c_encoding() + 6) % 7};
    }
    case viva::Granularity::month: {
        const year_month_day ymd{d};
        return sys_days{ymd.year() / ymd.month() / day{1}};
    }
    }
    return d;
}

struct Point {
    sys_days bucket;
    double value, lo, hi;
};

/// level -> points in bucket order.
inline std::map<std::string, std::vector<Point>> partition(const viva::Dataset& ds, std::string_view attr,
                                                          const viva::TimeRange& range, viva::Granularity g,
                                                          viva::ValueMode mode, bool accumulate) {
    Rows rows(ds);
    const auto& levels = ds.attribute(attr).levels;
    std::map<std::pair<std::string, long long>, double> daily;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (!rows.in(r, range)) continue;
        const auto s = *rows.seconds(r);
        const long long day = s >= 0 ? s / 86400 : -((-s + 86399) / 86400);
        for (const auto& l : levels_in(rows.cell(r, attr))) daily[{l, day}] += 1.0;
    }
    std::vector<sys_days> all_days;
    for (auto d = range.start(); d <= range.end(); d += days{1}) all_days.push_back(d);
    auto dn = [](sys_days d) { return static_cast<long long>(d.time_since_epoch().count()); };
    std::map<long long, double> totals;
    for (auto d : all_days)
        for (const auto& l : levels) totals[dn(d)] += daily[{l, dn(d)}];

    std::map<std::string, std::vector<Point>> out;
    for (const auto& l : levels) {
        // per-day value stream
        std::vector<std::pair<sys_days, double>> values;
        double run = 0.0;
        for (auto d : all_days) {
            double v = daily[{l, dn(d)}];
            if (mode == viva::ValueMode::percentage) v = totals[dn(d)] > 0 ? 100.0 * v / totals[dn(d)] : 0.0;
            if (accumulate) {
                run += v;
                v = run;
            }
            values.emplace_back(d, v);
        }
        std::vector<Point> pts;
        std::vector<double> bucket_vals;
        std::optional<sys_days> cur;
        auto close = [&] {
            if (!cur) return;
            Point p{*cur, 0, 0, 0};
            if (!bucket_vals.empty()) {
                double sum = 0;
                for (double v : bucket_vals) sum += v;
                p.value = sum / static_cast<double>(bucket_vals.size());
                p.lo = *std::min_element(bucket_vals.begin(), bucket_vals.end());
                p.hi = *std::max_element(bucket_vals.begin(), bucket_vals.end());
            }
            if (g == viva::Granularity::day || accumulate) p.lo = p.hi = p.value;
            pts.push_back(p);
            bucket_vals.clear();
        };
        for (const auto& [d, v] : values) {
            const auto b = bucket_of(d, g);
            if (!cur || *cur != b) {
                close();
                cur = b;
            }
            if (mode == viva::ValueMode::percentage && totals[dn(d)] == 0) continue;
            bucket_vals.push_back(v);
        }
        close();
        out[l] = std::move(pts);
    }
    return out;
}

} // namespace vt::oracle
