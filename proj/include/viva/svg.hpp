#pragma once

/**
 * @file svg.hpp
 * @brief Standalone SVG rendering of chart results.
 *
 * Layout is fixed so bytes depend only on the result. Each data mark has
 * class "mark ..." and there is exactly one per result entry:
 * rollup level / histogram bin -> rect.mark.bar, cross-tab segment ->
 * rect.mark.segment (zero counts included), partition series -> path.mark.line,
 * Sankey link -> path.mark.link.
 */

#include <algorithm>
#include <cstdio>
#include <string>
#include <string_view>

#include "viva/analytics.hpp"

namespace viva::svg {

inline constexpr double kWidth = 720.0;
inline constexpr double kMarginTop = 32.0;
inline constexpr double kMarginRight = 24.0;
inline constexpr double kMarginBottom = 32.0;
inline constexpr double kMarginLeft = 180.0;
inline constexpr double kBarHeight = 24.0;
inline constexpr double kBarGap = 6.0;
inline constexpr double kPlotHeight = 320.0;
inline constexpr double kFontSize = 12.0;
inline constexpr std::string_view kFont = "DejaVu Sans, Arial, sans-serif";
inline constexpr std::string_view kMarkFallback = "#7F7F7F";

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

inline std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n') out += ' ';
            else out += c;
        }
    }
    return out;
}

inline std::string fill(const std::string& color) { return color.empty() ? std::string(kMarkFallback) : color; }

class Doc {
public:
    Doc(double height, std::string_view title) : height_(height) {
        body_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
                 "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\" font-family=\"" + std::string(kFont) +
                 "\" font-size=\"" + num(kFontSize) + "\">\n";
        body_ += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
                 "\" fill=\"#FFFFFF\"/>\n";
        text(kMarginLeft, 20.0, title, "title", "start");
    }

    void rect(std::string_view cls, double x, double y, double w, double h, const std::string& color,
              std::string_view tip = {}) {
        body_ += "<rect class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                 num(std::max(0.0, w)) + "\" height=\"" + num(std::max(0.0, h)) + "\" fill=\"" + fill(color) + "\"";
        if (tip.empty()) body_ += "/>\n";
        else body_ += "><title>" + escape(tip) + "</title></rect>\n";
    }

    void path(std::string_view cls, const std::string& d, std::string_view attrs, std::string_view tip = {}) {
        body_ += "<path class=\"" + std::string(cls) + "\" d=\"" + d + "\" " + std::string(attrs);
        if (tip.empty()) body_ += "/>\n";
        else body_ += "><title>" + escape(tip) + "</title></path>\n";
    }

    void text(double x, double y, std::string_view s, std::string_view cls, std::string_view anchor) {
        body_ += "<text class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
                 "\" text-anchor=\"" + std::string(anchor) + "\">" + escape(s) + "</text>\n";
    }

    std::string finish() && {
        body_ += "</svg>\n";
        return std::move(body_);
    }

    double height() const { return height_; }

private:
    double height_;
    std::string body_;
};

inline double plot_width() { return kWidth - kMarginLeft - kMarginRight; }

inline double rows_height(std::size_t n) {
    return kMarginTop + static_cast<double>(n) * (kBarHeight + kBarGap) + kMarginBottom;
}

} // namespace detail

inline std::string render(const RollupResult& r) {
    using namespace detail;
    Doc doc(rows_height(r.levels.size()), r.attribute_id);
    std::int64_t peak = 0;
    for (const auto& l : r.levels) peak = std::max(peak, l.count);
    const double scale = peak > 0 ? plot_width() / static_cast<double>(peak) : 0.0;
    double y = kMarginTop;
    for (const auto& l : r.levels) {
        doc.text(kMarginLeft - 6.0, y + kBarHeight * 0.65, l.level, "label", "end");
        doc.rect("mark bar", kMarginLeft, y, static_cast<double>(l.count) * scale, kBarHeight, l.color,
                 l.level + ": " + std::to_string(l.count));
        y += kBarHeight + kBarGap;
    }
    return std::move(doc).finish();
}

inline std::string render(const HistogramResult& r) {
    using namespace detail;
    Doc doc(kMarginTop + kPlotHeight + kMarginBottom, r.attribute_id);
    std::int64_t peak = 0;
    for (const auto& b : r.bins) peak = std::max(peak, b.count);
    const double n = static_cast<double>(std::max<std::size_t>(1, r.bins.size()));
    const double w = plot_width() / n;
    const double base = kMarginTop + kPlotHeight;
    for (std::size_t i = 0; i < r.bins.size(); ++i) {
        const auto& b = r.bins[i];
        const double h = peak > 0 ? kPlotHeight * static_cast<double>(b.count) / static_cast<double>(peak) : 0.0;
        doc.rect("mark bar", kMarginLeft + static_cast<double>(i) * w, base - h, w - 1.0, h, "#1F77B4",
                 "[" + num(b.lo) + ", " + num(b.hi) + "): " + std::to_string(b.count));
    }
    if (!r.bins.empty()) {
        doc.text(kMarginLeft, base + 16.0, num(r.bins.front().lo), "axis", "start");
        doc.text(kMarginLeft + plot_width(), base + 16.0, num(r.bins.back().hi), "axis", "end");
    }
    return std::move(doc).finish();
}

inline std::string render(const PartitionResult& r) {
    using namespace detail;
    Doc doc(kMarginTop + kPlotHeight + kMarginBottom, r.attribute_id + " by " + std::string(to_string(r.granularity)));
    double peak = 0.0;
    std::size_t npts = 0;
    for (const auto& s : r.series) {
        npts = std::max(npts, s.points.size());
        for (const auto& p : s.points) peak = std::max({peak, p.value, p.band_max});
    }
    const double dx = npts > 1 ? plot_width() / static_cast<double>(npts - 1) : 0.0;
    const double base = kMarginTop + kPlotHeight;
    auto yof = [&](double v) { return peak > 0.0 ? base - kPlotHeight * v / peak : base; };
    const bool bands = r.granularity != Granularity::day && !r.accumulate;
    for (const auto& s : r.series) {
        if (s.points.empty()) continue;
        if (bands) {
            std::string d;
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                const double x = kMarginLeft + static_cast<double>(i) * dx;
                d += "M" + num(x) + " " + num(yof(s.points[i].band_min)) + "L" + num(x) + " " +
                     num(yof(s.points[i].band_max));
            }
            doc.path("band", d, "fill=\"none\" stroke=\"" + fill(s.color) + "\" stroke-opacity=\"0.4\" stroke-width=\"3\"");
        }
        std::string d;
        for (std::size_t i = 0; i < s.points.size(); ++i)
            d += (i ? "L" : "M") + num(kMarginLeft + static_cast<double>(i) * dx) + " " + num(yof(s.points[i].value));
        doc.path("mark line", d, "fill=\"none\" stroke=\"" + fill(s.color) + "\" stroke-width=\"2\"", s.level);
    }
    if (npts > 0) {
        const auto& pts = r.series.front().points;
        doc.text(kMarginLeft, base + 16.0, format_date(pts.front().bucket_start), "axis", "start");
        doc.text(kMarginLeft + plot_width(), base + 16.0, format_date(pts.back().bucket_start), "axis", "end");
    }
    return std::move(doc).finish();
}

inline std::string render(const CrossTabResult& r, bool percent = false) {
    using namespace detail;
    Doc doc(rows_height(r.bars.size()), r.bar_attribute_id + " by " + r.segment_attribute_id);
    std::int64_t peak = 0;
    for (const auto& b : r.bars) peak = std::max(peak, b.total);
    double y = kMarginTop;
    for (const auto& b : r.bars) {
        doc.text(kMarginLeft - 6.0, y + kBarHeight * 0.65, b.bar_level, "label", "end");
        double x = kMarginLeft;
        for (const auto& s : b.segments) {
            double w = 0.0;
            if (percent) w = plot_width() * s.percent / 100.0;
            else if (peak > 0) w = plot_width() * static_cast<double>(s.count) / static_cast<double>(peak);
            doc.rect("mark segment", x, y, w, kBarHeight, s.color, b.bar_level + " / " + s.segment_level + ": " +
                                                                        std::to_string(s.count));
            x += w;
        }
        y += kBarHeight + kBarGap;
    }
    return std::move(doc).finish();
}

inline std::string render(const SankeyResult& r) {
    using namespace detail;
    std::size_t levels = 1;
    for (const auto& st : r.nodes) levels = std::max(levels, st.size());
    const double height = kMarginTop + kPlotHeight + kMarginBottom;
    Doc doc(height, [&] {
        std::string t;
        for (std::size_t i = 0; i < r.stages.size(); ++i) t += (i ? " > " : "") + r.stages[i];
        return t;
    }());
    const double node_w = 14.0;
    const double gap = 8.0;
    const double stage_dx = r.nodes.size() > 1 ? (plot_width() - node_w) / static_cast<double>(r.nodes.size() - 1) : 0.0;
    std::int64_t peak = 1;
    for (const auto& st : r.nodes) {
        std::int64_t sum = 0;
        for (const auto& n : st) sum += n.total;
        peak = std::max(peak, sum);
    }
    const double usable = kPlotHeight - gap * static_cast<double>(levels);
    const double unit = usable / static_cast<double>(peak);

    // node top per stage/level, plus running offsets for link ends
    std::vector<std::vector<double>> top(r.nodes.size());
    std::vector<std::vector<double>> out_off(r.nodes.size()), in_off(r.nodes.size());
    for (std::size_t s = 0; s < r.nodes.size(); ++s) {
        double y = kMarginTop;
        const double x = kMarginLeft + static_cast<double>(s) * stage_dx;
        for (const auto& n : r.nodes[s]) {
            top[s].push_back(y);
            const double h = static_cast<double>(n.total) * unit;
            doc.rect("node", x, y, node_w, h, n.color, n.level + ": " + std::to_string(n.total));
            if (s == 0) doc.text(x - 4.0, y + std::max(h, kFontSize) * 0.5 + 4.0, n.level, "label", "end");
            else if (s + 1 == r.nodes.size())
                doc.text(x + node_w + 4.0, y + std::max(h, kFontSize) * 0.5 + 4.0, n.level, "label", "start");
            y += h + gap;
        }
        out_off[s].assign(r.nodes[s].size(), 0.0);
        in_off[s].assign(r.nodes[s].size(), 0.0);
    }
    auto find = [&](std::size_t s, const std::string& level) -> std::size_t {
        for (std::size_t i = 0; i < r.nodes[s].size(); ++i)
            if (r.nodes[s][i].level == level) return i;
        return 0;
    };
    for (const auto& l : r.links) {
        const auto s = l.from_stage;
        if (s + 1 >= r.nodes.size()) continue;
        const auto i = find(s, l.from_level);
        const auto j = find(s + 1, l.to_level);
        const double h = static_cast<double>(l.weight) * unit;
        const double x0 = kMarginLeft + static_cast<double>(s) * stage_dx + node_w;
        const double x1 = kMarginLeft + static_cast<double>(s + 1) * stage_dx;
        const double y0 = top[s][i] + out_off[s][i] + h / 2.0;
        const double y1 = top[s + 1][j] + in_off[s + 1][j] + h / 2.0;
        out_off[s][i] += h;
        in_off[s + 1][j] += h;
        const double mx = (x0 + x1) / 2.0;
        const std::string d = "M" + num(x0) + " " + num(y0) + "C" + num(mx) + " " + num(y0) + " " + num(mx) + " " +
                              num(y1) + " " + num(x1) + " " + num(y1);
        doc.path("mark link", d,
                 "fill=\"none\" stroke=\"" + fill(r.nodes[s][i].color) + "\" stroke-opacity=\"0.45\" stroke-width=\"" +
                     num(std::max(1.0, h)) + "\"",
                 l.from_level + " > " + l.to_level + ": " + std::to_string(l.weight));
    }
    return std::move(doc).finish();
}

} // namespace viva::svg
