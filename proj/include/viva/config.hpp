#pragma once

/**
 * @file config.hpp
 * @brief The configuration store: developer-specified rule files read at
 * startup plus the logged interaction files that grow with every session.
 *
 * Specified files are line-oriented (`#` comment lines, one rule per line);
 * logged files hold one JSON record per line. The grammars are documented in
 * docs/config-formats.md. Parsing never aborts: a bad line yields a
 * LineDiagnostic and the remainder of the file still loads.
 */

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "viva/error.hpp"
#include "viva/records.hpp"
#include "viva/tabular.hpp"

namespace viva {

namespace fs = std::filesystem;

inline constexpr const char* kSchemaFile = "schema.cfg";
inline constexpr const char* kMergesFile = "merges.cfg";
inline constexpr const char* kConcernsFile = "concerns.cfg";
inline constexpr const char* kColorsFile = "colors.cfg";
inline constexpr const char* kOrderingsFile = "orderings.cfg";
inline constexpr const char* kOpsLog = "ops.log";
inline constexpr const char* kConcernsLog = "concerns.log";

struct SchemaEntry {
    std::string dataset_name;
    std::string attribute_name;
    AttributeKind kind = AttributeKind::categorical;
    std::optional<std::string> units;
    std::optional<std::string> list_separator;
    bool time_designation = false;

    bool operator==(const SchemaEntry&) const = default;
};

struct SchemaConfig {
    std::vector<SchemaEntry> entries;

    const SchemaEntry* find(std::string_view dataset, std::string_view attribute) const {
        for (const auto& e : entries)
            if (e.dataset_name == dataset && e.attribute_name == attribute) return &e;
        return nullptr;
    }

    std::vector<const SchemaEntry*> entries_for(std::string_view dataset) const {
        std::vector<const SchemaEntry*> out;
        for (const auto& e : entries)
            if (e.dataset_name == dataset) out.push_back(&e);
        return out;
    }

    std::vector<std::string> dataset_names() const {
        std::vector<std::string> out;
        for (const auto& e : entries)
            if (std::find(out.begin(), out.end(), e.dataset_name) == out.end()) out.push_back(e.dataset_name);
        return out;
    }

    bool operator==(const SchemaConfig&) const = default;
};

struct MergeRule {
    std::string dataset;
    std::string attribute;
    std::string merged_level_name;
    std::vector<std::string> constituent_levels;
    bool operator==(const MergeRule&) const = default;
};

/// Members are `Dataset.Attribute` references by schema name.
struct ConcernSpec {
    std::string name;
    std::vector<std::string> members;
    bool operator==(const ConcernSpec&) const = default;
};

struct ColorRule {
    std::string dataset;
    std::string attribute;
    std::string level;
    std::string color;
    bool operator==(const ColorRule&) const = default;
};

struct OrderingRule {
    std::string dataset;
    std::string attribute;
    std::vector<std::string> levels;
    bool operator==(const OrderingRule&) const = default;
};

struct LineDiagnostic {
    std::string file;
    std::size_t line_no = 0;
    std::string message;
};

inline nlohmann::json to_json(const LineDiagnostic& d) {
    return {{"file", d.file}, {"line_no", d.line_no}, {"message", d.message}};
}

/// In-memory mirror of config_dir. `dir` is empty for a purely in-memory
/// store (tests), in which case appends skip the disk.
struct ConfigStore {
    std::optional<fs::path> dir;
    SchemaConfig schema;
    std::vector<MergeRule> merges;
    std::vector<ConcernSpec> concerns_spec;
    std::vector<ColorRule> colors;
    std::vector<OrderingRule> orderings;
    std::vector<Operation> logged_ops;
    std::vector<ConcernEdit> logged_concern_edits;

    const OrderingRule* ordering_for(std::string_view dataset, std::string_view attribute) const {
        for (const auto& r : orderings)
            if (r.dataset == dataset && r.attribute == attribute) return &r;
        return nullptr;
    }

    const ColorRule* color_for(std::string_view dataset, std::string_view attribute, std::string_view level) const {
        for (const auto& r : colors)
            if (r.dataset == dataset && r.attribute == attribute && r.level == level) return &r;
        return nullptr;
    }

    /// Largest seq across both logs (0 when empty).
    std::int64_t max_seq() const {
        std::int64_t m = 0;
        for (const auto& o : logged_ops) m = std::max(m, o.seq);
        for (const auto& e : logged_concern_edits) m = std::max(m, e.seq);
        return m;
    }

    bool specified_equal(const ConfigStore& o) const {
        return schema == o.schema && merges == o.merges && concerns_spec == o.concerns_spec && colors == o.colors &&
               orderings == o.orderings;
    }
};

struct LoadedConfig {
    ConfigStore store;
    std::vector<LineDiagnostic> diagnostics;
};

// ---------------------------------------------------------------------------
// Line parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        out.emplace_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

/// Splits `Dataset.Attribute` at the first dot.
inline std::optional<std::pair<std::string, std::string>> split_ref(std::string_view s) {
    s = trim(s);
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    auto ds = trim(s.substr(0, dot));
    auto at = trim(s.substr(dot + 1));
    if (ds.empty() || at.empty()) return std::nullopt;
    return std::make_pair(std::string(ds), std::string(at));
}

inline bool is_hex_color(std::string_view s) {
    if (s.size() != 7 || s[0] != '#') return false;
    return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

inline std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

template <class Fn>
void for_each_rule_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        const auto t = trim(raw);
        if (!t.empty() && t.front() != '#') fn(line_no, t);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// `Dataset.Attribute: kind [units=U] [sep=C] [time]`
inline SchemaConfig parse_schema(std::string_view text, std::vector<LineDiagnostic>& diags,
                                 const std::string& file = kSchemaFile) {
    SchemaConfig out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        auto bad = [&](const std::string& msg) { diags.push_back({file, ln, msg}); };
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) return bad("expected 'Dataset.Attribute: kind'");
        const auto ref = detail::split_ref(line.substr(0, colon));
        if (!ref) return bad("expected 'Dataset.Attribute' before ':'");
        const auto toks = detail::split_ws(line.substr(colon + 1));
        if (toks.empty()) return bad("missing attribute kind");
        SchemaEntry e;
        e.dataset_name = ref->first;
        e.attribute_name = ref->second;
        const auto& k = toks[0];
        if (k == "categorical") e.kind = AttributeKind::categorical;
        else if (k == "ordered") e.kind = AttributeKind::ordered;
        else if (k == "numerical" || k == "quantitative") e.kind = AttributeKind::quantitative;
        else if (k == "percent") {
            e.kind = AttributeKind::quantitative;
            e.units = "percent";
        } else if (k == "datetime") e.kind = AttributeKind::datetime;
        else if (k == "list") e.kind = AttributeKind::list;
        else if (k == "freeform") e.kind = AttributeKind::freeform;
        else if (k == "time") return bad("attribute kind 'time' (time of day only) is not supported");
        else return bad("unknown attribute kind '" + k + "'");
        for (std::size_t i = 1; i < toks.size(); ++i) {
            const auto& t = toks[i];
            if (t == "time") e.time_designation = true;
            else if (t.rfind("units=", 0) == 0 && t.size() > 6) e.units = t.substr(6);
            else if (t.rfind("sep=", 0) == 0 && t.size() > 4) e.list_separator = t.substr(4);
            else return bad("unknown schema option '" + t + "'");
        }
        if (e.kind == AttributeKind::quantitative && !e.units) return bad("numerical attribute requires units=");
        if (e.kind != AttributeKind::quantitative && e.units) return bad("units= only applies to numerical attributes");
        if (e.list_separator && e.kind != AttributeKind::list) return bad("sep= only applies to list attributes");
        if (e.time_designation && e.kind != AttributeKind::datetime) return bad("only datetime attributes can be time");
        if (out.find(e.dataset_name, e.attribute_name)) return bad("duplicate entry for " + e.dataset_name + "." + e.attribute_name);
        if (e.time_designation) {
            for (const auto* other : out.entries_for(e.dataset_name))
                if (other->time_designation) return bad("dataset " + e.dataset_name + " already has a time attribute");
        }
        out.entries.push_back(std::move(e));
    });
    return out;
}

/// `Dataset.Attribute: L1, L2[, ...] -> Merged`
inline std::vector<MergeRule> parse_merges(std::string_view text, std::vector<LineDiagnostic>& diags,
                                           const std::string& file = kMergesFile) {
    std::vector<MergeRule> out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        auto bad = [&](const std::string& msg) { diags.push_back({file, ln, msg}); };
        const auto colon = line.find(':');
        const auto arrow = line.rfind("->");
        if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon)
            return bad("expected 'Dataset.Attribute: L1, L2 -> Merged'");
        const auto ref = detail::split_ref(line.substr(0, colon));
        if (!ref) return bad("expected 'Dataset.Attribute' before ':'");
        auto levels = detail::split_list(line.substr(colon + 1, arrow - colon - 1), ',');
        const auto merged = std::string(trim(line.substr(arrow + 2)));
        if (merged.empty()) return bad("merged level name is empty");
        if (std::any_of(levels.begin(), levels.end(), [](const auto& l) { return l.empty(); }))
            return bad("empty constituent level");
        if (levels.empty()) return bad("no constituent levels");
        out.push_back({ref->first, ref->second, merged, std::move(levels)});
    });
    return out;
}

/// `Concern Name: Dataset.Attr, Dataset.Attr2, ...`
inline std::vector<ConcernSpec> parse_concerns(std::string_view text, std::vector<LineDiagnostic>& diags,
                                               const std::string& file = kConcernsFile) {
    std::vector<ConcernSpec> out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        auto bad = [&](const std::string& msg) { diags.push_back({file, ln, msg}); };
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) return bad("expected 'Concern: Dataset.Attribute, ...'");
        const auto name = std::string(trim(line.substr(0, colon)));
        if (name.empty()) return bad("concern name is empty");
        if (std::any_of(out.begin(), out.end(), [&](const auto& c) { return c.name == name; }))
            return bad("duplicate concern '" + name + "'");
        ConcernSpec c{name, {}};
        const auto rest = trim(line.substr(colon + 1));
        if (!rest.empty()) {
            for (auto& m : detail::split_list(rest, ',')) {
                const auto ref = detail::split_ref(m);
                if (!ref) return bad("bad attribute reference '" + m + "'");
                c.members.push_back(ref->first + "." + ref->second);
            }
        }
        out.push_back(std::move(c));
    });
    return out;
}

/// `Dataset.Attribute.Level = #RRGGBB`
inline std::vector<ColorRule> parse_colors(std::string_view text, std::vector<LineDiagnostic>& diags,
                                           const std::string& file = kColorsFile) {
    std::vector<ColorRule> out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        auto bad = [&](const std::string& msg) { diags.push_back({file, ln, msg}); };
        const auto eq = line.rfind('=');
        if (eq == std::string_view::npos) return bad("expected 'Dataset.Attribute.Level = #RRGGBB'");
        const auto key = trim(line.substr(0, eq));
        const auto color = std::string(trim(line.substr(eq + 1)));
        const auto d1 = key.find('.');
        const auto d2 = d1 == std::string_view::npos ? d1 : key.find('.', d1 + 1);
        if (d2 == std::string_view::npos) return bad("expected 'Dataset.Attribute.Level' before '='");
        ColorRule r{std::string(trim(key.substr(0, d1))), std::string(trim(key.substr(d1 + 1, d2 - d1 - 1))),
                    std::string(trim(key.substr(d2 + 1))), detail::upper(color)};
        if (r.dataset.empty() || r.attribute.empty() || r.level.empty()) return bad("empty dataset, attribute or level");
        if (!detail::is_hex_color(color)) return bad("color must be #RRGGBB");
        out.push_back(std::move(r));
    });
    return out;
}

/// `Dataset.Attribute: L1, L2, ...`
inline std::vector<OrderingRule> parse_orderings(std::string_view text, std::vector<LineDiagnostic>& diags,
                                                 const std::string& file = kOrderingsFile) {
    std::vector<OrderingRule> out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        auto bad = [&](const std::string& msg) { diags.push_back({file, ln, msg}); };
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) return bad("expected 'Dataset.Attribute: L1, L2, ...'");
        const auto ref = detail::split_ref(line.substr(0, colon));
        if (!ref) return bad("expected 'Dataset.Attribute' before ':'");
        auto levels = detail::split_list(line.substr(colon + 1), ',');
        if (std::any_of(levels.begin(), levels.end(), [](const auto& l) { return l.empty(); }))
            return bad("empty level in ordering");
        out.push_back({ref->first, ref->second, std::move(levels)});
    });
    return out;
}

/// Logged files: one JSON record per line, in append order.
template <class Record, class Decode>
std::vector<Record> parse_log(std::string_view text, std::vector<LineDiagnostic>& diags, const std::string& file,
                              Decode&& decode) {
    std::vector<Record> out;
    detail::for_each_rule_line(text, [&](std::size_t ln, std::string_view line) {
        try {
            auto rec = decode(nlohmann::json::parse(line));
            if (!out.empty() && rec.seq <= out.back().seq) {
                diags.push_back({file, ln, "seq " + std::to_string(rec.seq) + " is not increasing"});
                return;
            }
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            diags.push_back({file, ln, std::string("malformed record: ") + e.what()});
        } catch (const Error& e) {
            diags.push_back({file, ln, std::string("malformed record: ") + e.what()});
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Serialization of the specified sections
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join(const std::vector<std::string>& v, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

} // namespace detail

inline std::string serialize_schema(const SchemaConfig& s) {
    std::string out;
    for (const auto& e : s.entries) {
        out += e.dataset_name + "." + e.attribute_name + ": ";
        if (e.kind == AttributeKind::quantitative) out += (e.units == "percent") ? "percent" : "numerical";
        else out += std::string(to_string(e.kind));
        if (e.kind == AttributeKind::quantitative && e.units != "percent") out += " units=" + *e.units;
        if (e.list_separator) out += " sep=" + *e.list_separator;
        if (e.time_designation) out += " time";
        out += '\n';
    }
    return out;
}

inline std::string serialize_merges(const std::vector<MergeRule>& rules) {
    std::string out;
    for (const auto& r : rules)
        out += r.dataset + "." + r.attribute + ": " + detail::join(r.constituent_levels, ", ") + " -> " +
               r.merged_level_name + "\n";
    return out;
}

inline std::string serialize_concerns(const std::vector<ConcernSpec>& specs) {
    std::string out;
    for (const auto& c : specs) out += c.name + ": " + detail::join(c.members, ", ") + "\n";
    return out;
}

inline std::string serialize_colors(const std::vector<ColorRule>& rules) {
    std::string out;
    for (const auto& r : rules) out += r.dataset + "." + r.attribute + "." + r.level + " = " + r.color + "\n";
    return out;
}

inline std::string serialize_orderings(const std::vector<OrderingRule>& rules) {
    std::string out;
    for (const auto& r : rules) out += r.dataset + "." + r.attribute + ": " + detail::join(r.levels, ", ") + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Loading and persistence
// ---------------------------------------------------------------------------

/// Reads every known file in `config_dir`; absent files give empty sections.
inline LoadedConfig load_config(const fs::path& config_dir) {
    LoadedConfig out;
    auto& s = out.store;
    auto& d = out.diagnostics;
    s.dir = config_dir;
    auto text = [&](const char* name) -> std::string {
        const auto p = config_dir / name;
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) return {};
        return detail::read_file(p);
    };
    s.schema = parse_schema(text(kSchemaFile), d);
    s.merges = parse_merges(text(kMergesFile), d);
    s.concerns_spec = parse_concerns(text(kConcernsFile), d);
    s.colors = parse_colors(text(kColorsFile), d);
    s.orderings = parse_orderings(text(kOrderingsFile), d);
    s.logged_ops = parse_log<Operation>(text(kOpsLog), d, kOpsLog, operation_from_json);
    s.logged_concern_edits = parse_log<ConcernEdit>(text(kConcernsLog), d, kConcernsLog, concern_edit_from_json);
    return out;
}

namespace detail {

inline void write_all(int fd, std::string_view data, const fs::path& p) {
    while (!data.empty()) {
        const auto n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(ErrorCode::IoError, "write " + p.string() + ": " + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

/// Appends and fsyncs before returning.
inline void durable_append(const fs::path& p, std::string_view line) {
    const int fd = ::open(p.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::IoError, "open " + p.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, line, p);
        if (::fsync(fd) != 0) fail(ErrorCode::IoError, "fsync " + p.string() + ": " + std::strerror(errno));
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
}

/// Write-temp-then-rename.
inline void atomic_rewrite(const fs::path& p, std::string_view content) {
    auto tmp = p;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_TRUNC | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::IoError, "open " + tmp.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, content, tmp);
        if (::fsync(fd) != 0) fail(ErrorCode::IoError, "fsync " + tmp.string() + ": " + std::strerror(errno));
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) fail(ErrorCode::IoError, "rename " + tmp.string() + ": " + ec.message());
}

} // namespace detail

inline void append_logged(ConfigStore& store, const Operation& op) {
    if (store.dir) detail::durable_append(*store.dir / kOpsLog, to_json(op).dump() + "\n");
    store.logged_ops.push_back(op);
}

inline void append_logged(ConfigStore& store, const ConcernEdit& edit) {
    if (store.dir) detail::durable_append(*store.dir / kConcernsLog, to_json(edit).dump() + "\n");
    store.logged_concern_edits.push_back(edit);
}

/// The one permitted non-append rewrite of ops.log (used by operation removal).
inline void rewrite_logged_ops(ConfigStore& store, std::vector<Operation> ops) {
    if (store.dir) {
        std::string content;
        for (const auto& op : ops) content += to_json(op).dump() + "\n";
        detail::atomic_rewrite(*store.dir / kOpsLog, content);
    }
    store.logged_ops = std::move(ops);
}

// ---------------------------------------------------------------------------
// Level styling
// ---------------------------------------------------------------------------

struct NamedColor {
    std::string_view word;
    std::string_view hex;
};

inline constexpr NamedColor kColorWords[] = {
    {"red", "#D62728"},   {"yellow", "#E8C547"}, {"green", "#2CA02C"}, {"orange", "#FF7F0E"}, {"blue", "#1F77B4"},
    {"purple", "#9467BD"}, {"grey", "#7F7F7F"},  {"gray", "#7F7F7F"},  {"black", "#000000"},
};

inline constexpr std::string_view kPalette[12] = {"#A6CEE3", "#1F78B4", "#B2DF8A", "#33A02C", "#FB9A99", "#E31A1C",
                                                  "#FDBF6F", "#FF7F00", "#CAB2D6", "#6A3D9A", "#FFFF99", "#B15928"};

/// Splits a level name into words: on non-alphanumerics, lower-to-upper
/// transitions, the last capital of an acronym run (`HLBCYellow` -> HLBC,
/// Yellow) and letter/digit boundaries.
inline std::vector<std::string> name_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    auto up = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
    auto lo = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
    auto dig = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (!cur.empty()) {
            const char p = cur.back();
            const bool next_lower = i + 1 < s.size() && lo(s[i + 1]);
            if ((lo(p) && up(c)) || (up(p) && up(c) && next_lower) || (dig(p) != dig(c))) flush();
        }
        cur += c;
    }
    flush();
    return out;
}

/// Explicit rule, then a color word carried by the level name, then a stable
/// palette slot derived from the attribute lineage and level.
inline std::string resolve_color(const ConfigStore& store, const AttributeDef& attribute, std::string_view level) {
    if (const auto* r = store.color_for(attribute.dataset_id, attribute.config_name, level)) return r->color;
    for (const auto& tok : name_tokens(level)) {
        const auto w = detail::lower(tok);
        for (const auto& nc : kColorWords)
            if (nc.word == w) return std::string(nc.hex);
    }
    Fingerprint fp;
    fp.str(attribute.root_id());
    fp.str(level);
    return std::string(kPalette[fp.value() % 12]);
}

/// Natural order: numeric strings by value, otherwise digit runs compare
/// numerically and everything else byte-wise.
inline bool natural_less(std::string_view a, std::string_view b) {
    const auto na = parse_number(a);
    const auto nb = parse_number(b);
    if (na && nb) {
        if (*na != *nb) return *na < *nb;
        return a < b;
    }
    auto dig = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (dig(a[i]) && dig(b[j])) {
            auto si = i, sj = j;
            while (i < a.size() && dig(a[i])) ++i;
            while (j < b.size() && dig(b[j])) ++j;
            auto ra = a.substr(si, i - si);
            auto rb = b.substr(sj, j - sj);
            while (ra.size() > 1 && ra.front() == '0') ra.remove_prefix(1);
            while (rb.size() > 1 && rb.front() == '0') rb.remove_prefix(1);
            if (ra.size() != rb.size()) return ra.size() < rb.size();
            if (ra != rb) return ra < rb;
        } else {
            if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
    return a < b;
}

inline std::vector<std::string> resolve_level_order(const ConfigStore& store, const AttributeDef& attribute,
                                                    const std::unordered_map<std::string, std::size_t>& counts) {
    auto count_of = [&](const std::string& l) {
        auto it = counts.find(l);
        return it == counts.end() ? std::size_t{0} : it->second;
    };
    auto by_count = [&](const std::string& a, const std::string& b) {
        const auto ca = count_of(a), cb = count_of(b);
        if (ca != cb) return ca > cb;
        return a < b;
    };
    std::vector<std::string> rest = attribute.levels;
    std::vector<std::string> out;
    if (const auto* rule = store.ordering_for(attribute.dataset_id, attribute.config_name)) {
        for (const auto& l : rule->levels) {
            auto it = std::find(rest.begin(), rest.end(), l);
            if (it == rest.end()) continue;
            out.push_back(l);
            rest.erase(it);
        }
        std::stable_sort(rest.begin(), rest.end(), by_count);
    } else if (attribute.kind == AttributeKind::ordered) {
        std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return natural_less(a, b); });
    } else {
        std::stable_sort(rest.begin(), rest.end(), by_count);
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

inline std::vector<std::string> resolve_level_order(const ConfigStore& store, const AttributeDef& attribute,
                                                    const Column& column) {
    return resolve_level_order(store, attribute, level_counts(column));
}

} // namespace viva
