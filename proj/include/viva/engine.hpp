#pragma once

/**
 * @file engine.hpp
 * @brief The operation algebra over an immutable base: apply, replay,
 * dependency closure and removal by filtered replay.
 *
 * Two entry points share one executor. `apply` validates an interactive
 * request strictly (levels must exist, names must not collide, ...),
 * normalizes it and fills the fields decided at apply time. `replay` re-runs
 * already-logged operations and only insists on what the log itself depends
 * on: referenced attributes and levels must exist.
 */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "viva/error.hpp"
#include "viva/records.hpp"
#include "viva/tabular.hpp"

namespace viva {

inline constexpr std::size_t kMaxExplodeLevels = 50;

struct EngineState {
    std::vector<std::string> dataset_order;
    std::map<std::string, std::shared_ptr<const Dataset>> base;
    std::map<std::string, Dataset> derived;
    std::vector<Operation> log;

    static EngineState from_base(std::vector<Dataset> datasets) {
        EngineState s;
        for (auto& d : datasets) {
            const auto id = d.id();
            if (s.base.count(id)) fail(ErrorCode::InvalidParams, "duplicate dataset " + id);
            s.dataset_order.push_back(id);
            auto ptr = std::make_shared<const Dataset>(std::move(d));
            s.derived.emplace(id, *ptr);
            s.base.emplace(id, std::move(ptr));
        }
        return s;
    }

    const Dataset& dataset(std::string_view id) const {
        auto it = derived.find(std::string(id));
        if (it == derived.end())
            fail(ErrorCode::UnknownDataset, "unknown dataset '" + std::string(id) + "'", {{"dataset_id", id}});
        return it->second;
    }

    /// Display order of a dataset's attributes (derived copies sit right
    /// after their source).
    const std::vector<AttributeDef>& attribute_order(std::string_view dataset_id) const {
        return dataset(dataset_id).attributes();
    }

    /// Dataset holding `attribute_id` in the derived state, if any.
    std::optional<std::string> dataset_of(std::string_view attribute_id) const {
        for (const auto& id : dataset_order)
            if (derived.at(id).find(attribute_id)) return id;
        return std::nullopt;
    }

    std::int64_t last_seq() const { return log.empty() ? 0 : log.back().seq; }
};

/// Orders the levels of an attribute for display; Explode creates one derived
/// attribute per bar level in this order.
using LevelOrder = std::function<std::vector<std::string>(const AttributeDef&, const Column&)>;

inline std::vector<std::string> stored_level_order(const AttributeDef& a, const Column&) { return a.levels; }

struct ApplyResult {
    Operation op;
    std::vector<std::string> created_attribute_ids;
    /// Attribute the new ones were inserted after.
    std::string source_attribute_id;
};

inline std::string derived_attribute_id(std::string_view dataset_id, std::int64_t seq) {
    return std::string(dataset_id) + "#" + std::to_string(seq);
}

inline std::string derived_attribute_id(std::string_view dataset_id, std::int64_t seq, std::size_t index) {
    return derived_attribute_id(dataset_id, seq) + "." + std::to_string(index);
}

inline std::string explode_attribute_name(const AttributeDef& a, const AttributeDef& b, std::string_view level) {
    return b.name + " | " + a.name + "=" + std::string(level);
}

namespace detail {

inline std::string unique_attribute_name(const Dataset& ds, const std::string& wanted) {
    if (!ds.has_attribute_name(wanted)) return wanted;
    for (int k = 2;; ++k) {
        auto candidate = wanted + " (" + std::to_string(k) + ")";
        if (!ds.has_attribute_name(candidate)) return candidate;
    }
}

inline bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

inline std::vector<std::string> dedupe(const std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& s : v)
        if (!contains(out, s)) out.push_back(s);
    return out;
}

/// Rewrites every level-bearing cell with `map_level`, which returns the new
/// level or nullopt to drop it.
template <class Fn>
Column map_levels(const Column& in, Fn&& map_level) {
    Column out;
    out.reserve(in.size());
    for (const auto& cell : in) {
        if (const auto* c = std::get_if<Category>(&cell)) {
            if (auto v = map_level(c->value)) out.push_back(Category{std::move(*v)});
            else out.push_back(Missing{});
        } else if (const auto* l = std::get_if<ValueList>(&cell)) {
            std::vector<std::string> vals;
            for (const auto& e : l->values)
                if (auto v = map_level(e)) vals.push_back(std::move(*v));
            out.push_back(make_list(std::move(vals)));
        } else {
            out.push_back(cell);
        }
    }
    return out;
}

/// Keeps `levels` order but drops anything not present in `column`.
inline std::vector<std::string> restrict_to_observed(const std::vector<std::string>& levels, const Column& column) {
    const auto counts = level_counts(column);
    std::vector<std::string> out;
    for (const auto& l : levels)
        if (counts.count(l) && !contains(out, l)) out.push_back(l);
    return out;
}

inline void require_levels_exist(const AttributeDef& a, const std::vector<std::string>& levels) {
    for (const auto& l : levels)
        if (!contains(a.levels, l))
            fail(ErrorCode::UnknownLevel, "attribute '" + a.name + "' has no level '" + l + "'",
                 {{"attribute_id", a.id}, {"level", l}});
}

inline const AttributeDef& require_attribute(const Dataset& ds, std::string_view id) {
    const auto idx = ds.index_of(id);
    const auto& a = ds.attribute_at(idx);
    if (!a.chartable) fail(ErrorCode::NotChartable, "attribute '" + a.name + "' is not chartable", {{"attribute_id", id}});
    return a;
}

inline AttributeDef copy_def(const AttributeDef& src, std::string id, std::string name) {
    AttributeDef d = src;
    d.id = std::move(id);
    d.name = std::move(name);
    d.origin = Origin::derived;
    return d;
}

/// The level-edit transform on one attribute slot of `ds`.
inline void edit_levels(Dataset& ds, std::size_t idx, const Operation& op) {
    const auto& a = ds.attribute_at(idx);
    const auto& col = ds.column_at(idx);
    Column next;
    std::vector<std::string> levels;
    switch (op.kind) {
    case OpKind::FilterOut: {
        require_levels_exist(a, op.levels);
        const std::unordered_set<std::string> drop(op.levels.begin(), op.levels.end());
        next = map_levels(col, [&](const std::string& v) -> std::optional<std::string> {
            if (drop.count(v)) return std::nullopt;
            return v;
        });
        for (const auto& l : a.levels)
            if (!drop.count(l)) levels.push_back(l);
        break;
    }
    case OpKind::KeepOnly: {
        require_levels_exist(a, op.levels);
        const std::unordered_set<std::string> keep(op.levels.begin(), op.levels.end());
        next = map_levels(col, [&](const std::string& v) -> std::optional<std::string> {
            if (!keep.count(v)) return std::nullopt;
            return v;
        });
        for (const auto& l : a.levels)
            if (keep.count(l)) levels.push_back(l);
        break;
    }
    case OpKind::MergeLevels:
    case OpKind::RenameLevel: {
        require_levels_exist(a, op.levels);
        auto from = op.levels;
        if (op.kind == OpKind::RenameLevel && contains(a.levels, op.new_name) && !contains(from, op.new_name))
            from.push_back(op.new_name);
        const std::unordered_set<std::string> merged(from.begin(), from.end());
        next = map_levels(col, [&](const std::string& v) -> std::optional<std::string> {
            if (merged.count(v)) return op.new_name;
            return v;
        });
        bool placed = false;
        for (const auto& l : a.levels) {
            if (merged.count(l) || l == op.new_name) {
                if (!placed) levels.push_back(op.new_name);
                placed = true;
            } else {
                levels.push_back(l);
            }
        }
        break;
    }
    default: fail(ErrorCode::InvalidParams, "not a level edit");
    }
    AttributeDef def = a;
    def.levels = restrict_to_observed(levels, next);
    ds.replace(idx, std::move(def), std::make_shared<const Column>(std::move(next)));
}

/// Executes a fully specified operation against the derived copy of its
/// dataset. Returns the attribute the created ones were inserted after.
inline std::string execute(Dataset& ds, const Operation& op) {
    const auto idx = ds.index_of(op.target_attribute_id);
    const auto& target = require_attribute(ds, op.target_attribute_id);
    const std::string target_id = target.id;
    switch (op.kind) {
    case OpKind::FilterOut:
    case OpKind::KeepOnly:
    case OpKind::MergeLevels:
    case OpKind::RenameLevel: {
        if (!has_levels(target.kind))
            fail(ErrorCode::WrongKind, "attribute '" + target.name + "' has no levels", {{"attribute_id", target_id}});
        if (!op.mode) fail(ErrorCode::InvalidParams, "level edits need a mode");
        std::size_t work = idx;
        if (*op.mode == EditMode::MakeNew) {
            if (op.created_attribute_ids.size() != 1) fail(ErrorCode::InvalidParams, "MakeNew creates one attribute");
            auto def = copy_def(target, op.created_attribute_ids[0], unique_attribute_name(ds, target.name + " (copy)"));
            auto col = ds.column_ptr(idx);
            ds.insert(idx + 1, std::move(def), std::move(col));
            work = idx + 1;
        } else if (!op.created_attribute_ids.empty()) {
            fail(ErrorCode::InvalidParams, "ModifyCurrent creates no attributes");
        }
        edit_levels(ds, work, op);
        return target_id;
    }
    case OpKind::RenameAttribute:
        if (op.new_name.empty()) fail(ErrorCode::InvalidParams, "new attribute name is empty");
        ds.mutable_attribute(idx).name = op.new_name;
        return target_id;
    case OpKind::DuplicateAttribute: {
        if (op.created_attribute_ids.size() != 1) fail(ErrorCode::InvalidParams, "duplicate creates one attribute");
        auto def = copy_def(target, op.created_attribute_ids[0], unique_attribute_name(ds, target.name + " (copy)"));
        auto col = ds.column_ptr(idx);
        ds.insert(idx + 1, std::move(def), std::move(col));
        return target_id;
    }
    case OpKind::Explode: {
        const auto bidx = ds.index_of(op.second_attribute_id);
        const auto& b = require_attribute(ds, op.second_attribute_id);
        if (!is_stratifiable(target.kind) || !is_stratifiable(b.kind))
            fail(ErrorCode::WrongKind, "explode needs categorical or ordered attributes");
        if (b.id == target_id) fail(ErrorCode::InvalidParams, "explode needs two distinct attributes");
        if (op.created_attribute_ids.size() != op.levels.size() || op.levels.empty())
            fail(ErrorCode::InvalidParams, "explode must create one attribute per bar level");
        require_levels_exist(target, op.levels);
        const auto a_def = target;
        const auto b_def = b;
        const auto a_col = ds.column_ptr(idx);
        const auto b_col = ds.column_ptr(bidx);
        for (std::size_t i = 0; i < op.levels.size(); ++i) {
            const auto& level = op.levels[i];
            Column col;
            col.reserve(b_col->size());
            for (std::size_t r = 0; r < b_col->size(); ++r) {
                const auto* c = std::get_if<Category>(&(*a_col)[r]);
                if (c && c->value == level) col.push_back((*b_col)[r]);
                else col.push_back(Missing{});
            }
            auto def = copy_def(b_def, op.created_attribute_ids[i],
                                unique_attribute_name(ds, explode_attribute_name(a_def, b_def, level)));
            def.levels = restrict_to_observed(b_def.levels, col);
            const auto pos = ds.index_of(b_def.id) + 1 + i;
            ds.insert(pos, std::move(def), std::make_shared<const Column>(std::move(col)));
        }
        return b_def.id;
    }
    }
    return target_id;
}

} // namespace detail

/// Strict validation and normalization of an interactive request. Fills
/// dataset_id (when empty), explode bar levels and created_attribute_ids.
inline Operation prepare(const EngineState& state, Operation op, const LevelOrder& order = stored_level_order) {
    if (op.seq <= state.last_seq())
        fail(ErrorCode::InvalidParams, "seq " + std::to_string(op.seq) + " is not after the last logged operation");
    if (op.dataset_id.empty()) {
        auto ds = state.dataset_of(op.target_attribute_id);
        if (!ds)
            fail(ErrorCode::UnknownAttribute, "unknown attribute '" + op.target_attribute_id + "'",
                 {{"attribute_id", op.target_attribute_id}});
        op.dataset_id = *ds;
    }
    const auto& ds = state.dataset(op.dataset_id);
    const auto& target = detail::require_attribute(ds, op.target_attribute_id);
    op.created_attribute_ids.clear();
    op.new_name = std::string(trim(op.new_name));

    if (is_level_edit(op.kind)) {
        if (!has_levels(target.kind))
            fail(ErrorCode::WrongKind, "attribute '" + target.name + "' has no levels", {{"attribute_id", target.id}});
        if (!op.mode) fail(ErrorCode::InvalidParams, "level edits need an explicit mode");
        op.levels = detail::dedupe(op.levels);
        detail::require_levels_exist(target, op.levels);
    } else {
        op.mode.reset();
    }

    switch (op.kind) {
    case OpKind::FilterOut:
        if (op.levels.empty()) fail(ErrorCode::InvalidParams, "FilterOut needs at least one level");
        break;
    case OpKind::KeepOnly:
        if (op.levels.empty()) fail(ErrorCode::EmptyResult, "KeepOnly with no levels would empty the attribute");
        break;
    case OpKind::MergeLevels:
        if (op.levels.size() < 2) fail(ErrorCode::InvalidParams, "MergeLevels needs at least two levels");
        if (op.new_name.empty()) fail(ErrorCode::InvalidParams, "merged level name is empty");
        if (detail::contains(target.levels, op.new_name) && !detail::contains(op.levels, op.new_name))
            op.levels.push_back(op.new_name);
        break;
    case OpKind::RenameLevel:
        if (op.levels.size() != 1) fail(ErrorCode::InvalidParams, "RenameLevel takes exactly one level");
        if (op.new_name.empty()) fail(ErrorCode::InvalidParams, "new level name is empty");
        if (op.new_name != op.levels[0] && detail::contains(target.levels, op.new_name)) {
            op.kind = OpKind::MergeLevels;
            op.levels.push_back(op.new_name);
        }
        break;
    case OpKind::RenameAttribute:
        if (op.new_name.empty()) fail(ErrorCode::InvalidParams, "new attribute name is empty");
        for (const auto& a : ds.attributes())
            if (a.id != target.id && a.name == op.new_name)
                fail(ErrorCode::NameCollision, "dataset already has an attribute named '" + op.new_name + "'",
                     {{"name", op.new_name}});
        op.levels.clear();
        break;
    case OpKind::DuplicateAttribute:
        op.levels.clear();
        op.new_name.clear();
        break;
    case OpKind::Explode: {
        if (op.second_attribute_id.empty()) fail(ErrorCode::InvalidParams, "Explode needs a second attribute");
        if (!ds.find(op.second_attribute_id)) {
            if (state.dataset_of(op.second_attribute_id))
                fail(ErrorCode::CrossDataset, "explode attributes must belong to one dataset");
            fail(ErrorCode::UnknownAttribute, "unknown attribute '" + op.second_attribute_id + "'",
                 {{"attribute_id", op.second_attribute_id}});
        }
        const auto& b = detail::require_attribute(ds, op.second_attribute_id);
        if (!is_stratifiable(target.kind) || !is_stratifiable(b.kind))
            fail(ErrorCode::WrongKind, "explode needs categorical or ordered attributes");
        if (b.id == target.id) fail(ErrorCode::InvalidParams, "explode needs two distinct attributes");
        if (target.levels.size() > kMaxExplodeLevels)
            fail(ErrorCode::TooManyLevels,
                 "attribute '" + target.name + "' has " + std::to_string(target.levels.size()) +
                     " levels; explode allows at most " + std::to_string(kMaxExplodeLevels));
        if (target.levels.empty()) fail(ErrorCode::EmptyResult, "attribute '" + target.name + "' has no levels");
        op.levels = order(target, ds.column(target.id));
        op.new_name.clear();
        for (std::size_t i = 0; i < op.levels.size(); ++i)
            op.created_attribute_ids.push_back(derived_attribute_id(op.dataset_id, op.seq, i));
        break;
    }
    }
    if (op.kind != OpKind::Explode) op.second_attribute_id.clear();
    if ((is_level_edit(op.kind) && *op.mode == EditMode::MakeNew) || op.kind == OpKind::DuplicateAttribute)
        op.created_attribute_ids.push_back(derived_attribute_id(op.dataset_id, op.seq));
    return op;
}

/// Validates, executes and logs `op` in memory. Strong guarantee: on any
/// error the state is unchanged.
inline ApplyResult apply(EngineState& state, Operation op, const LevelOrder& order = stored_level_order) {
    op = prepare(state, std::move(op), order);
    Dataset work = state.dataset(op.dataset_id);
    auto source = detail::execute(work, op);
    state.derived[op.dataset_id] = std::move(work);
    state.log.push_back(op);
    return {op, op.created_attribute_ids, std::move(source)};
}

/// Re-executes one logged operation; failures surface as InconsistentLog.
inline std::string replay_one(EngineState& state, const Operation& op) {
    try {
        if (op.seq <= state.last_seq()) fail(ErrorCode::InvalidParams, "seq is not increasing");
        std::vector<std::string> expected;
        if (op.kind == OpKind::Explode)
            for (std::size_t i = 0; i < op.levels.size(); ++i)
                expected.push_back(derived_attribute_id(op.dataset_id, op.seq, i));
        else if ((is_level_edit(op.kind) && op.mode == EditMode::MakeNew) || op.kind == OpKind::DuplicateAttribute)
            expected.push_back(derived_attribute_id(op.dataset_id, op.seq));
        if (expected != op.created_attribute_ids) fail(ErrorCode::InvalidParams, "created attribute ids do not match");
        Dataset work = state.dataset(op.dataset_id);
        auto source = detail::execute(work, op);
        state.derived[op.dataset_id] = std::move(work);
        state.log.push_back(op);
        return source;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InconsistentLog) throw;
        fail(ErrorCode::InconsistentLog, "operation " + std::to_string(op.seq) + " cannot be replayed: " + e.what(),
             {{"seq", op.seq}, {"cause", to_string(e.code())}});
    }
}

/// Pure: derived state from the base and a log.
inline EngineState replay(const EngineState& base_state, const std::vector<Operation>& log) {
    EngineState s;
    s.dataset_order = base_state.dataset_order;
    s.base = base_state.base;
    for (const auto& [id, ptr] : s.base) s.derived.emplace(id, *ptr);
    for (const auto& op : log) replay_one(s, op);
    return s;
}

// ---------------------------------------------------------------------------
// Dependencies
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> referenced_levels(const Operation& op) {
    switch (op.kind) {
    case OpKind::FilterOut:
    case OpKind::KeepOnly:
    case OpKind::MergeLevels:
    case OpKind::RenameLevel:
    case OpKind::Explode: return op.levels;
    default: return {};
    }
}

inline std::optional<std::string> introduced_level(const Operation& op) {
    if (op.kind == OpKind::MergeLevels || op.kind == OpKind::RenameLevel) return op.new_name;
    return std::nullopt;
}

} // namespace detail

/// Direct dependency lists: `graph[i]` holds indices j > i of operations that
/// depend on log[i].
///
/// B depends on an earlier A when
///   (i)   B targets an attribute A created;
///   (ii)  B references a level A introduced (merge or rename target) on B's
///         target, where A edited that attribute, its MakeNew copy, or an
///         ancestor B's target was copied from after A;
///   (iii) B is an Explode whose second attribute A created.
inline std::vector<std::vector<std::size_t>> dependency_graph(const std::vector<Operation>& log) {
    // attribute id -> (parent attribute, seq of the creating op)
    std::unordered_map<std::string, std::pair<std::string, std::int64_t>> parent;
    for (const auto& op : log) {
        const auto& src = op.kind == OpKind::Explode ? op.second_attribute_id : op.target_attribute_id;
        for (const auto& c : op.created_attribute_ids) parent[c] = {src, op.seq};
    }
    auto inherits_from = [&](std::string attr, const std::string& ancestor, std::int64_t after_seq) {
        while (true) {
            auto it = parent.find(attr);
            if (it == parent.end() || it->second.second <= after_seq) return false;
            if (it->second.first == ancestor) return true;
            attr = it->second.first;
        }
    };
    const auto n = log.size();
    std::vector<std::vector<std::size_t>> graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = log[i];
        const std::unordered_set<std::string> created(a.created_attribute_ids.begin(), a.created_attribute_ids.end());
        const auto intro = detail::introduced_level(a);
        std::vector<std::string> intro_sites{a.target_attribute_id};
        if (intro && a.mode == EditMode::MakeNew && !a.created_attribute_ids.empty())
            intro_sites.push_back(a.created_attribute_ids.front());
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& b = log[j];
            if (b.dataset_id != a.dataset_id) continue;
            bool dep = created.count(b.target_attribute_id) > 0;
            if (!dep && b.kind == OpKind::Explode) dep = created.count(b.second_attribute_id) > 0;
            if (!dep && intro) {
                const auto refs = detail::referenced_levels(b);
                if (detail::contains(refs, *intro)) {
                    for (const auto& site : intro_sites)
                        if (b.target_attribute_id == site || inherits_from(b.target_attribute_id, site, a.seq))
                            dep = true;
                }
            }
            if (dep) graph[i].push_back(j);
        }
    }
    return graph;
}

namespace detail {

inline std::size_t log_index(const std::vector<Operation>& log, std::int64_t seq) {
    for (std::size_t i = 0; i < log.size(); ++i)
        if (log[i].seq == seq) return i;
    fail(ErrorCode::UnknownSeq, "no operation with seq " + std::to_string(seq), {{"seq", seq}});
}

inline void close_over(const std::vector<std::vector<std::size_t>>& graph, std::size_t start,
                       std::vector<bool>& seen) {
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        for (auto j : graph[i])
            if (!seen[j]) {
                seen[j] = true;
                stack.push_back(j);
            }
    }
}

} // namespace detail

/// Transitive dependents of `seq` (excluding `seq` itself).
inline std::set<std::int64_t> dependents(const std::vector<Operation>& log, std::int64_t seq) {
    const auto start = detail::log_index(log, seq);
    const auto graph = dependency_graph(log);
    std::vector<bool> seen(log.size(), false);
    detail::close_over(graph, start, seen);
    std::set<std::int64_t> out;
    for (std::size_t i = 0; i < log.size(); ++i)
        if (seen[i]) out.insert(log[i].seq);
    return out;
}

/// Dependents of every logged operation, keyed by seq.
inline std::map<std::int64_t, std::set<std::int64_t>> all_dependents(const std::vector<Operation>& log) {
    const auto graph = dependency_graph(log);
    std::map<std::int64_t, std::set<std::int64_t>> out;
    for (std::size_t i = 0; i < log.size(); ++i) {
        std::vector<bool> seen(log.size(), false);
        detail::close_over(graph, i, seen);
        auto& s = out[log[i].seq];
        for (std::size_t j = 0; j < log.size(); ++j)
            if (seen[j]) s.insert(log[j].seq);
    }
    return out;
}

/// Closure of a set of seqs under `dependents`, including the seqs.
inline std::set<std::int64_t> dependency_closure(const std::vector<Operation>& log, const std::set<std::int64_t>& seqs) {
    const auto graph = dependency_graph(log);
    std::vector<bool> seen(log.size(), false);
    for (auto s : seqs) {
        const auto i = detail::log_index(log, s);
        seen[i] = true;
        detail::close_over(graph, i, seen);
    }
    std::set<std::int64_t> out;
    for (std::size_t i = 0; i < log.size(); ++i)
        if (seen[i]) out.insert(log[i].seq);
    return out;
}

inline std::vector<Operation> without(const std::vector<Operation>& log, const std::set<std::int64_t>& seqs) {
    std::vector<Operation> out;
    for (const auto& op : log)
        if (!seqs.count(op.seq)) out.push_back(op);
    return out;
}

/// Removes `seqs` (which must already be closed under dependents) by
/// replaying the filtered log over the base.
inline EngineState remove_ops(const EngineState& state, const std::set<std::int64_t>& seqs) {
    const auto closure = dependency_closure(state.log, seqs);
    std::vector<std::int64_t> missing;
    for (auto s : closure)
        if (!seqs.count(s)) missing.push_back(s);
    if (!missing.empty())
        fail(ErrorCode::DependencyViolation, "removal would leave dependent operations behind",
             {{"missing", missing}});
    return replay(state, without(state.log, seqs));
}

inline EngineState undo_last(const EngineState& state) {
    if (state.log.empty()) fail(ErrorCode::EmptyLog, "nothing to undo");
    return remove_ops(state, {state.log.back().seq});
}

/// Byte-level fingerprint of the derived state (datasets in order).
inline std::uint64_t state_fingerprint(const EngineState& s) {
    Fingerprint fp;
    for (const auto& id : s.dataset_order) {
        fp.str(id);
        fp.u64(fingerprint(s.derived.at(id)));
    }
    return fp.value();
}

inline std::uint64_t base_fingerprint(const EngineState& s) {
    Fingerprint fp;
    for (const auto& id : s.dataset_order) {
        fp.str(id);
        fp.u64(fingerprint(*s.base.at(id)));
    }
    return fp.value();
}

} // namespace viva
