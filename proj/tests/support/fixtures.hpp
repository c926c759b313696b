#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "viva/concerns.hpp"
#include "viva/config.hpp"
#include "viva/engine.hpp"
#include "viva/ingest.hpp"

namespace vt {

namespace fs = std::filesystem;

inline viva::SchemaConfig schema_of(std::string_view text) {
    std::vector<viva::LineDiagnostic> diags;
    auto s = viva::parse_schema(text, diags);
    if (!diags.empty()) throw std::runtime_error("schema: " + diags.front().message);
    return s;
}

inline viva::Dataset load(std::string_view csv, const std::string& name, std::string_view schema_text,
                          std::span<const viva::MergeRule> merges = {}) {
    return viva::parse_csv(csv, name, schema_of(schema_text), merges);
}

inline viva::EngineState state_of(viva::Dataset d) {
    std::vector<viva::Dataset> v;
    v.push_back(std::move(d));
    return viva::EngineState::from_base(std::move(v));
}

inline viva::TimeRange range(std::string_view a, std::string_view b) {
    return viva::TimeRange(*viva::parse_date(a), *viva::parse_date(b));
}

inline viva::TimeRange wide_range() { return range("1900-01-01", "2199-12-31"); }

inline viva::Operation op(viva::OpKind kind, std::string target, std::vector<std::string> levels = {},
                          std::string new_name = {}, std::optional<viva::EditMode> mode = viva::EditMode::ModifyCurrent) {
    viva::Operation o;
    o.kind = kind;
    o.target_attribute_id = std::move(target);
    o.levels = std::move(levels);
    o.new_name = std::move(new_name);
    o.mode = mode;
    return o;
}

/// Applies `o` with the next seq.
inline viva::ApplyResult apply_next(viva::EngineState& s, viva::Operation o,
                                    const viva::LevelOrder& order = viva::stored_level_order) {
    o.seq = s.last_seq() + 1;
    return viva::apply(s, std::move(o), order);
}

/// Error code thrown by `f`, if any.
template <class F>
std::optional<viva::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const viva::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Counts of `level` in an attribute's column.
inline std::size_t count_of(const viva::EngineState& s, std::string_view ds, std::string_view attr,
                            std::string_view level) {
    const auto counts = viva::level_counts(s.dataset(ds).column(attr));
    const auto it = counts.find(std::string(level));
    return it == counts.end() ? 0 : it->second;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag = "viva") {
        static std::atomic<int> n{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(n.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

    void write(const std::string& name, std::string_view content) const {
        std::ofstream out(path_ / name, std::ios::binary);
        out << content;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(path_ / name, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

private:
    fs::path path_;
};

} // namespace vt
