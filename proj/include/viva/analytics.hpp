#pragma once

/**
 * @file analytics.hpp
 * @brief Chart data for the action modes: rollup counts, histograms,
 * temporal partitions with min/max bands, cross-tabs and Sankey links.
 *
 * All functions are pure over a dataset snapshot. Level order and colors
 * come from the configuration store.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "viva/config.hpp"
#include "viva/engine.hpp"
#include "viva/tabular.hpp"

namespace viva {

enum class Granularity { day, week, month };
enum class ValueMode { absolute, percentage };

inline std::string_view to_string(Granularity g) {
    switch (g) {
    case Granularity::day: return "day";
    case Granularity::week: return "week";
    case Granularity::month: return "month";
    }
    return "day";
}

inline Granularity parse_granularity(std::string_view s) {
    if (s == "day") return Granularity::day;
    if (s == "week") return Granularity::week;
    if (s == "month") return Granularity::month;
    fail(ErrorCode::InvalidParams, "granularity must be day, week or month");
}

inline std::string_view to_string(ValueMode m) { return m == ValueMode::absolute ? "absolute" : "percentage"; }

inline ValueMode parse_value_mode(std::string_view s) {
    if (s == "absolute") return ValueMode::absolute;
    if (s == "percentage") return ValueMode::percentage;
    fail(ErrorCode::InvalidParams, "value_mode must be absolute or percentage");
}

struct LevelCount {
    std::string level;
    std::int64_t count = 0;
    std::string color;
};

struct RollupResult {
    std::string attribute_id;
    std::vector<LevelCount> levels;
    std::int64_t total = 0;
};

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t count = 0;
};

struct HistogramResult {
    std::string attribute_id;
    std::vector<HistogramBin> bins;
};

struct PartitionPoint {
    Date bucket_start;
    double value = 0.0;
    double band_min = 0.0;
    double band_max = 0.0;
};

struct PartitionSeries {
    std::string level;
    std::string color;
    std::vector<PartitionPoint> points;
};

struct PartitionResult {
    std::string attribute_id;
    Granularity granularity = Granularity::day;
    ValueMode value_mode = ValueMode::absolute;
    bool accumulate = false;
    std::vector<PartitionSeries> series;
};

struct Segment {
    std::string segment_level;
    std::int64_t count = 0;
    double percent = 0.0;
    std::string color;
};

struct Bar {
    std::string bar_level;
    std::int64_t total = 0;
    std::vector<Segment> segments;
};

struct CrossTabResult {
    std::string bar_attribute_id;
    std::string segment_attribute_id;
    std::vector<Bar> bars;
};

struct SankeyNode {
    std::string level;
    std::int64_t total = 0;
    std::string color;
};

struct SankeyLink {
    std::size_t from_stage = 0;
    std::string from_level;
    std::string to_level;
    std::int64_t weight = 0;
};

struct SankeyResult {
    std::vector<std::string> stages;
    std::vector<std::vector<SankeyNode>> nodes;
    std::vector<SankeyLink> links;
};

namespace detail {

inline const AttributeDef& chart_attribute(const Dataset& ds, std::string_view id) {
    const auto& a = ds.attribute(id);
    if (!a.chartable) fail(ErrorCode::NotChartable, "attribute '" + a.name + "' is not chartable", {{"attribute_id", id}});
    return a;
}

/// Display order plus a level -> index map.
struct LevelIndex {
    std::vector<std::string> order;
    std::unordered_map<std::string_view, std::size_t> index;

    LevelIndex(const ConfigStore& store, const AttributeDef& a, const Column& col)
        : order(resolve_level_order(store, a, col)) {
        for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);
    }

    std::optional<std::size_t> of(const std::string& level) const {
        auto it = index.find(level);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

/// Calls fn(level_index) for each level a cell carries.
template <class Fn>
void for_each_level(const CellValue& cell, const LevelIndex& idx, Fn&& fn) {
    if (const auto* c = std::get_if<Category>(&cell)) {
        if (auto i = idx.of(c->value)) fn(*i);
    } else if (const auto* l = std::get_if<ValueList>(&cell)) {
        for (const auto& v : l->values)
            if (auto i = idx.of(v)) fn(*i);
    }
}

inline std::optional<std::size_t> single_level(const CellValue& cell, const LevelIndex& idx) {
    if (const auto* c = std::get_if<Category>(&cell)) return idx.of(c->value);
    return std::nullopt;
}

/// Smallest 1, 2 or 5 x 10^k step that is >= raw.
inline double nice_step(double raw) {
    if (!(raw > 0.0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        const double s = m * mag;
        if (s >= raw * (1.0 - 1e-12)) return s;
    }
    return 10.0 * mag;
}

inline std::int32_t bucket_key(std::int32_t day, Granularity g) {
    using namespace std::chrono;
    switch (g) {
    case Granularity::day: return day;
    case Granularity::week: {
        const auto wd = weekday{date_from_day(day)}.iso_encoding(); // Monday = 1
        return day - static_cast<std::int32_t>(wd - 1);
    }
    case Granularity::month: {
        const year_month_day ymd{date_from_day(day)};
        return day_number(sys_days{ymd.year() / ymd.month() / 1});
    }
    }
    return day;
}

} // namespace detail

inline RollupResult rollup(const Dataset& ds, std::string_view attribute_id, const TimeRange& range,
                           const ConfigStore& store) {
    const auto& a = detail::chart_attribute(ds, attribute_id);
    if (!has_levels(a.kind))
        fail(ErrorCode::WrongKind, "rollup needs a categorical, ordered or list attribute", {{"attribute_id", a.id}});
    const auto& col = ds.column(attribute_id);
    const detail::LevelIndex idx(store, a, col);
    std::vector<std::int64_t> counts(idx.order.size(), 0);
    const auto& days = ds.row_days();
    for (std::size_t r = 0; r < col.size(); ++r)
        if (range.contains_day(days[r])) detail::for_each_level(col[r], idx, [&](std::size_t i) { ++counts[i]; });
    RollupResult out{a.id, {}, 0};
    for (std::size_t i = 0; i < idx.order.size(); ++i) {
        out.levels.push_back({idx.order[i], counts[i], resolve_color(store, a, idx.order[i])});
        out.total += counts[i];
    }
    return out;
}

/// Equal-width bins on 1/2/5 x 10^k boundaries covering [min, max]; the last
/// bin is closed above. No numeric cells in range gives no bins.
inline HistogramResult histogram(const Dataset& ds, std::string_view attribute_id, const TimeRange& range,
                                 std::size_t bin_count = 20) {
    const auto& a = detail::chart_attribute(ds, attribute_id);
    if (a.kind != AttributeKind::quantitative)
        fail(ErrorCode::WrongKind, "histogram needs a quantitative attribute", {{"attribute_id", a.id}});
    if (bin_count == 0) fail(ErrorCode::InvalidParams, "bin_count must be positive");
    const auto& col = ds.column(attribute_id);
    const auto& days = ds.row_days();
    std::vector<double> values;
    for (std::size_t r = 0; r < col.size(); ++r)
        if (range.contains_day(days[r]))
            if (const auto* n = std::get_if<Number>(&col[r])) values.push_back(n->value);
    HistogramResult out{a.id, {}};
    if (values.empty()) return out;
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it, mx = *mx_it;
    double step = 1.0;
    double lo = std::floor(mn);
    std::size_t n = 1;
    if (mx > mn) {
        step = detail::nice_step((mx - mn) / static_cast<double>(bin_count));
        lo = std::floor(mn / step) * step;
        if (lo > mn) lo -= step;
        n = static_cast<std::size_t>(std::max(1.0, std::ceil((mx - lo) / step)));
        while (lo + static_cast<double>(n) * step < mx) ++n;
    }
    std::vector<double> edges(n + 1);
    for (std::size_t i = 0; i <= n; ++i) edges[i] = lo + static_cast<double>(i) * step;
    std::vector<std::int64_t> counts(n, 0);
    for (double v : values) {
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        auto b = static_cast<std::size_t>(std::distance(edges.begin(), it));
        b = b == 0 ? 0 : b - 1;
        if (b >= n) b = n - 1;
        ++counts[b];
    }
    for (std::size_t i = 0; i < n; ++i) out.bins.push_back({edges[i], edges[i + 1], counts[i]});
    return out;
}

/// Per-level series over the days of `range`. Daily counts come first;
/// week (ISO, Monday start) and month buckets report the mean of their
/// in-range daily values with min/max bands. Percentages are taken per day
/// before aggregating, and days with no data are left out of percentage
/// buckets. Accumulation runs over daily absolute counts and collapses the
/// bands onto the value.
inline PartitionResult partition(const Dataset& ds, std::string_view attribute_id, const TimeRange& range,
                                 Granularity granularity, ValueMode value_mode, bool accumulate,
                                 const ConfigStore& store) {
    if (accumulate && value_mode == ValueMode::percentage)
        fail(ErrorCode::InvalidCombination, "cumulative percentages are not supported");
    const auto& a = detail::chart_attribute(ds, attribute_id);
    if (!has_levels(a.kind))
        fail(ErrorCode::WrongKind, "partition needs a categorical, ordered or list attribute", {{"attribute_id", a.id}});
    const auto& col = ds.column(attribute_id);
    const detail::LevelIndex idx(store, a, col);
    const auto nlev = idx.order.size();
    const auto first = range.first_day();
    const auto ndays = static_cast<std::size_t>(range.last_day() - first + 1);

    std::vector<std::vector<double>> daily(nlev, std::vector<double>(ndays, 0.0));
    const auto& days = ds.row_days();
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (!range.contains_day(days[r])) continue;
        const auto d = static_cast<std::size_t>(days[r] - first);
        detail::for_each_level(col[r], idx, [&](std::size_t i) { daily[i][d] += 1.0; });
    }
    std::vector<bool> has_data(ndays, true);
    if (value_mode == ValueMode::percentage) {
        for (std::size_t d = 0; d < ndays; ++d) {
            double total = 0.0;
            for (std::size_t i = 0; i < nlev; ++i) total += daily[i][d];
            has_data[d] = total > 0.0;
            for (std::size_t i = 0; i < nlev; ++i) daily[i][d] = total > 0.0 ? 100.0 * daily[i][d] / total : 0.0;
        }
    }
    if (accumulate)
        for (auto& series : daily)
            for (std::size_t d = 1; d < ndays; ++d) series[d] += series[d - 1];

    // Buckets in day order: [start offset, end offset).
    std::vector<std::pair<std::size_t, std::size_t>> buckets;
    std::vector<std::int32_t> keys;
    for (std::size_t d = 0; d < ndays; ++d) {
        const auto key = detail::bucket_key(first + static_cast<std::int32_t>(d), granularity);
        if (keys.empty() || keys.back() != key) {
            keys.push_back(key);
            buckets.emplace_back(d, d + 1);
        } else {
            buckets.back().second = d + 1;
        }
    }

    PartitionResult out{a.id, granularity, value_mode, accumulate, {}};
    for (std::size_t i = 0; i < nlev; ++i) {
        PartitionSeries s{idx.order[i], resolve_color(store, a, idx.order[i]), {}};
        s.points.reserve(buckets.size());
        for (std::size_t b = 0; b < buckets.size(); ++b) {
            double sum = 0.0, mn = 0.0, mx = 0.0;
            std::size_t n = 0;
            for (auto d = buckets[b].first; d < buckets[b].second; ++d) {
                if (!has_data[d]) continue;
                const double v = daily[i][d];
                if (n == 0) mn = mx = v;
                mn = std::min(mn, v);
                mx = std::max(mx, v);
                sum += v;
                ++n;
            }
            PartitionPoint p{date_from_day(keys[b]), n ? sum / static_cast<double>(n) : 0.0, mn, mx};
            if (granularity == Granularity::day || accumulate) p.band_min = p.band_max = p.value;
            s.points.push_back(p);
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

inline CrossTabResult cross_tab(const Dataset& ds, std::string_view bar_attribute, std::string_view segment_attribute,
                                const TimeRange& range, const ConfigStore& store) {
    const auto& ab = detail::chart_attribute(ds, bar_attribute);
    const auto& as = detail::chart_attribute(ds, segment_attribute);
    if (!is_stratifiable(ab.kind) || !is_stratifiable(as.kind))
        fail(ErrorCode::WrongKind, "stratify needs categorical or ordered attributes");
    const auto& cb = ds.column(bar_attribute);
    const auto& cs = ds.column(segment_attribute);
    const detail::LevelIndex ib(store, ab, cb), is(store, as, cs);
    std::vector<std::vector<std::int64_t>> m(ib.order.size(), std::vector<std::int64_t>(is.order.size(), 0));
    const auto& days = ds.row_days();
    for (std::size_t r = 0; r < cb.size(); ++r) {
        if (!range.contains_day(days[r])) continue;
        const auto i = detail::single_level(cb[r], ib);
        const auto j = detail::single_level(cs[r], is);
        if (i && j) ++m[*i][*j];
    }
    CrossTabResult out{ab.id, as.id, {}};
    for (std::size_t i = 0; i < ib.order.size(); ++i) {
        Bar bar{ib.order[i], 0, {}};
        for (auto c : m[i]) bar.total += c;
        for (std::size_t j = 0; j < is.order.size(); ++j) {
            const double pct = bar.total > 0 ? 100.0 * static_cast<double>(m[i][j]) / static_cast<double>(bar.total) : 0.0;
            bar.segments.push_back({is.order[j], m[i][j], pct, resolve_color(store, as, is.order[j])});
        }
        out.bars.push_back(std::move(bar));
    }
    return out;
}

/// Stages follow selection order. Each adjacent pair is tallied over the
/// rows non-Missing in both of its stages; zero-weight links are omitted.
inline SankeyResult sankey(const Dataset& ds, const std::vector<std::string>& attrs, const TimeRange& range,
                           const ConfigStore& store) {
    if (attrs.size() < 2 || attrs.size() > 3) fail(ErrorCode::WrongArity, "flow needs two or three attributes");
    for (std::size_t i = 0; i < attrs.size(); ++i)
        for (std::size_t j = i + 1; j < attrs.size(); ++j)
            if (attrs[i] == attrs[j]) fail(ErrorCode::InvalidParams, "flow attributes must be distinct");
    std::vector<const AttributeDef*> defs;
    std::vector<const Column*> cols;
    std::vector<detail::LevelIndex> idx;
    for (const auto& id : attrs) {
        const auto& a = detail::chart_attribute(ds, id);
        if (!is_stratifiable(a.kind)) fail(ErrorCode::WrongKind, "flow needs categorical or ordered attributes");
        defs.push_back(&a);
        cols.push_back(&ds.column(id));
        idx.emplace_back(store, a, *cols.back());
    }
    const auto& days = ds.row_days();
    SankeyResult out;
    out.stages = attrs;
    for (std::size_t s = 0; s < attrs.size(); ++s) {
        std::vector<std::int64_t> totals(idx[s].order.size(), 0);
        for (std::size_t r = 0; r < days.size(); ++r)
            if (range.contains_day(days[r]))
                if (auto i = detail::single_level((*cols[s])[r], idx[s])) ++totals[*i];
        std::vector<SankeyNode> nodes;
        for (std::size_t i = 0; i < totals.size(); ++i)
            nodes.push_back({idx[s].order[i], totals[i], resolve_color(store, *defs[s], idx[s].order[i])});
        out.nodes.push_back(std::move(nodes));
    }
    for (std::size_t s = 0; s + 1 < attrs.size(); ++s) {
        std::vector<std::vector<std::int64_t>> m(idx[s].order.size(), std::vector<std::int64_t>(idx[s + 1].order.size(), 0));
        for (std::size_t r = 0; r < days.size(); ++r) {
            if (!range.contains_day(days[r])) continue;
            const auto i = detail::single_level((*cols[s])[r], idx[s]);
            const auto j = detail::single_level((*cols[s + 1])[r], idx[s + 1]);
            if (i && j) ++m[*i][*j];
        }
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m[i].size(); ++j)
                if (m[i][j] > 0) out.links.push_back({s, idx[s].order[i], idx[s + 1].order[j], m[i][j]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// State-level entry points
// ---------------------------------------------------------------------------

namespace detail {

/// Dataset that holds `attribute_id`, insisting it is `dataset_id`.
inline const Dataset& owning_dataset(const EngineState& state, std::string_view dataset_id,
                                     std::string_view attribute_id) {
    const auto& ds = state.dataset(dataset_id);
    if (!ds.find(attribute_id) && state.dataset_of(attribute_id))
        fail(ErrorCode::CrossDataset, "attribute '" + std::string(attribute_id) + "' belongs to another dataset",
             {{"attribute_id", attribute_id}});
    return ds;
}

} // namespace detail

inline RollupResult rollup(const EngineState& s, std::string_view dataset_id, std::string_view attribute_id,
                           const TimeRange& range, const ConfigStore& store) {
    return rollup(detail::owning_dataset(s, dataset_id, attribute_id), attribute_id, range, store);
}

inline HistogramResult histogram(const EngineState& s, std::string_view dataset_id, std::string_view attribute_id,
                                 const TimeRange& range, std::size_t bin_count = 20) {
    return histogram(detail::owning_dataset(s, dataset_id, attribute_id), attribute_id, range, bin_count);
}

inline PartitionResult partition(const EngineState& s, std::string_view dataset_id, std::string_view attribute_id,
                                 const TimeRange& range, Granularity g, ValueMode m, bool accumulate,
                                 const ConfigStore& store) {
    return partition(detail::owning_dataset(s, dataset_id, attribute_id), attribute_id, range, g, m, accumulate, store);
}

inline CrossTabResult cross_tab(const EngineState& s, std::string_view dataset_id, std::string_view bar,
                                std::string_view seg, const TimeRange& range, const ConfigStore& store) {
    detail::owning_dataset(s, dataset_id, bar);
    return cross_tab(detail::owning_dataset(s, dataset_id, seg), bar, seg, range, store);
}

inline SankeyResult sankey(const EngineState& s, std::string_view dataset_id, const std::vector<std::string>& attrs,
                           const TimeRange& range, const ConfigStore& store) {
    for (const auto& a : attrs) detail::owning_dataset(s, dataset_id, a);
    return sankey(s.dataset(dataset_id), attrs, range, store);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const RollupResult& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : r.levels) levels.push_back({{"level", l.level}, {"count", l.count}, {"color", l.color}});
    return {{"attribute_id", r.attribute_id}, {"levels", levels}, {"total", r.total}};
}

inline nlohmann::json to_json(const HistogramResult& r) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    return {{"attribute_id", r.attribute_id}, {"bins", bins}};
}

inline nlohmann::json to_json(const PartitionResult& r) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : r.series) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : s.points)
            pts.push_back({{"bucket_start", format_date(p.bucket_start)},
                           {"value", p.value},
                           {"band_min", p.band_min},
                           {"band_max", p.band_max}});
        series.push_back({{"level", s.level}, {"color", s.color}, {"points", pts}});
    }
    return {{"attribute_id", r.attribute_id},
            {"granularity", to_string(r.granularity)},
            {"value_mode", to_string(r.value_mode)},
            {"accumulate", r.accumulate},
            {"series", series}};
}

inline nlohmann::json to_json(const CrossTabResult& r) {
    nlohmann::json bars = nlohmann::json::array();
    for (const auto& b : r.bars) {
        nlohmann::json segs = nlohmann::json::array();
        for (const auto& s : b.segments)
            segs.push_back(
                {{"segment_level", s.segment_level}, {"count", s.count}, {"percent", s.percent}, {"color", s.color}});
        bars.push_back({{"bar_level", b.bar_level}, {"total", b.total}, {"segments", segs}});
    }
    return {{"bar_attribute_id", r.bar_attribute_id}, {"segment_attribute_id", r.segment_attribute_id}, {"bars", bars}};
}

inline nlohmann::json to_json(const SankeyResult& r) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& stage : r.nodes) {
        nlohmann::json st = nlohmann::json::array();
        for (const auto& n : stage) st.push_back({{"level", n.level}, {"total", n.total}, {"color", n.color}});
        nodes.push_back(st);
    }
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : r.links)
        links.push_back(
            {{"from_stage", l.from_stage}, {"from_level", l.from_level}, {"to_level", l.to_level}, {"weight", l.weight}});
    return {{"stages", r.stages}, {"nodes", nodes}, {"links", links}};
}

} // namespace viva
