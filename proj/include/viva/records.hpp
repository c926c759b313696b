#pragma once

/**
 * @file records.hpp
 * @brief Logged interaction records: data operations and Concern edits,
 * with their one-line structured serialization.
 *
 * Both logs draw `seq` from one shared counter, so merging them by `seq`
 * reconstructs the exact interleaving of a session.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "viva/error.hpp"

namespace viva {

enum class OpKind { FilterOut, KeepOnly, MergeLevels, RenameLevel, RenameAttribute, DuplicateAttribute, Explode };
enum class EditMode { MakeNew, ModifyCurrent };

inline std::string_view to_string(OpKind k) {
    switch (k) {
    case OpKind::FilterOut: return "FilterOut";
    case OpKind::KeepOnly: return "KeepOnly";
    case OpKind::MergeLevels: return "MergeLevels";
    case OpKind::RenameLevel: return "RenameLevel";
    case OpKind::RenameAttribute: return "RenameAttribute";
    case OpKind::DuplicateAttribute: return "DuplicateAttribute";
    case OpKind::Explode: return "Explode";
    }
    return "";
}

inline OpKind parse_op_kind(std::string_view s) {
    for (auto k : {OpKind::FilterOut, OpKind::KeepOnly, OpKind::MergeLevels, OpKind::RenameLevel,
                   OpKind::RenameAttribute, OpKind::DuplicateAttribute, OpKind::Explode})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidParams, "unknown operation kind '" + std::string(s) + "'");
}

inline std::string_view to_string(EditMode m) { return m == EditMode::MakeNew ? "MakeNew" : "ModifyCurrent"; }

inline EditMode parse_edit_mode(std::string_view s) {
    if (s == "MakeNew") return EditMode::MakeNew;
    if (s == "ModifyCurrent") return EditMode::ModifyCurrent;
    fail(ErrorCode::InvalidParams, "unknown mode '" + std::string(s) + "'");
}

/// Level edits are the kinds that take a MakeNew/ModifyCurrent mode.
inline bool is_level_edit(OpKind k) {
    return k == OpKind::FilterOut || k == OpKind::KeepOnly || k == OpKind::MergeLevels || k == OpKind::RenameLevel;
}

/// One customization or derivation step. Which params are meaningful depends
/// on `kind`:
///   FilterOut / KeepOnly  levels
///   MergeLevels           levels -> new_name
///   RenameLevel           levels[0] -> new_name
///   RenameAttribute       new_name
///   Explode               target = bar attribute, second_attribute_id =
///                         segment attribute, levels = bar levels (filled on apply)
struct Operation {
    std::int64_t seq = 0;
    OpKind kind = OpKind::FilterOut;
    std::string dataset_id;
    std::string target_attribute_id;
    std::vector<std::string> levels;
    std::string new_name;
    std::string second_attribute_id;
    std::optional<EditMode> mode;
    std::vector<std::string> created_attribute_ids;
    std::string timestamp;
    std::string session_id;

    bool operator==(const Operation&) const = default;
};

enum class ConcernEditKind { Create, Copy, Rename, Delete, AddMember, RemoveMember, MoveMember, SetActive };

inline std::string_view to_string(ConcernEditKind k) {
    switch (k) {
    case ConcernEditKind::Create: return "Create";
    case ConcernEditKind::Copy: return "Copy";
    case ConcernEditKind::Rename: return "Rename";
    case ConcernEditKind::Delete: return "Delete";
    case ConcernEditKind::AddMember: return "AddMember";
    case ConcernEditKind::RemoveMember: return "RemoveMember";
    case ConcernEditKind::MoveMember: return "MoveMember";
    case ConcernEditKind::SetActive: return "SetActive";
    }
    return "";
}

inline ConcernEditKind parse_concern_edit_kind(std::string_view s) {
    for (auto k : {ConcernEditKind::Create, ConcernEditKind::Copy, ConcernEditKind::Rename, ConcernEditKind::Delete,
                   ConcernEditKind::AddMember, ConcernEditKind::RemoveMember, ConcernEditKind::MoveMember,
                   ConcernEditKind::SetActive})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidParams, "unknown concern edit kind '" + std::string(s) + "'");
}

/// `concern` names the edited Concern (the source for Copy); `new_name` is the
/// Rename target or the name of the Copy.
struct ConcernEdit {
    std::int64_t seq = 0;
    ConcernEditKind kind = ConcernEditKind::Create;
    std::string concern;
    std::string new_name;
    std::string attribute_id;
    std::optional<std::size_t> index;
    std::vector<std::string> members;
    std::string timestamp;
    std::string session_id;

    bool operator==(const ConcernEdit&) const = default;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json op_params_json(const Operation& op) {
    nlohmann::json p = {{"dataset_id", op.dataset_id}, {"target_attribute_id", op.target_attribute_id}};
    switch (op.kind) {
    case OpKind::FilterOut:
    case OpKind::KeepOnly: p["levels"] = op.levels; break;
    case OpKind::MergeLevels:
    case OpKind::RenameLevel:
        p["levels"] = op.levels;
        p["new_name"] = op.new_name;
        break;
    case OpKind::RenameAttribute: p["new_name"] = op.new_name; break;
    case OpKind::DuplicateAttribute: break;
    case OpKind::Explode:
        p["second_attribute_id"] = op.second_attribute_id;
        p["levels"] = op.levels;
        break;
    }
    if (op.mode) p["mode"] = to_string(*op.mode);
    p["created_attribute_ids"] = op.created_attribute_ids;
    return p;
}

inline nlohmann::json to_json(const Operation& op) {
    return {{"seq", op.seq},
            {"timestamp", op.timestamp},
            {"session_id", op.session_id},
            {"kind", to_string(op.kind)},
            {"params", op_params_json(op)}};
}

namespace detail {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidParams, std::string("field '") + key + "': " + e.what());
    }
}

} // namespace detail

/// Reads the flat request shape `{kind, dataset_id, target_attribute_id, ...}`
/// or the logged shape with a nested `params` object.
inline Operation operation_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorCode::InvalidParams, "operation must be an object");
    const auto& p = j.contains("params") ? j.at("params") : j;
    Operation op;
    op.seq = detail::get_or<std::int64_t>(j, "seq", 0);
    op.kind = parse_op_kind(detail::get_or<std::string>(j, "kind", ""));
    op.timestamp = detail::get_or<std::string>(j, "timestamp", "");
    op.session_id = detail::get_or<std::string>(j, "session_id", "");
    op.dataset_id = detail::get_or<std::string>(p, "dataset_id", "");
    op.target_attribute_id = detail::get_or<std::string>(p, "target_attribute_id", "");
    op.levels = detail::get_or<std::vector<std::string>>(p, "levels", {});
    op.new_name = detail::get_or<std::string>(p, "new_name", "");
    op.second_attribute_id = detail::get_or<std::string>(p, "second_attribute_id", "");
    if (auto m = detail::get_or<std::string>(p, "mode", ""); !m.empty()) op.mode = parse_edit_mode(m);
    op.created_attribute_ids = detail::get_or<std::vector<std::string>>(p, "created_attribute_ids", {});
    return op;
}

inline nlohmann::json to_json(const ConcernEdit& e) {
    nlohmann::json p = {{"concern", e.concern}};
    if (!e.new_name.empty()) p["new_name"] = e.new_name;
    if (!e.attribute_id.empty()) p["attribute_id"] = e.attribute_id;
    if (e.index) p["index"] = *e.index;
    if (!e.members.empty()) p["members"] = e.members;
    return {{"seq", e.seq},
            {"timestamp", e.timestamp},
            {"session_id", e.session_id},
            {"kind", to_string(e.kind)},
            {"params", p}};
}

inline ConcernEdit concern_edit_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorCode::InvalidParams, "concern edit must be an object");
    const auto& p = j.contains("params") ? j.at("params") : j;
    ConcernEdit e;
    e.seq = detail::get_or<std::int64_t>(j, "seq", 0);
    e.kind = parse_concern_edit_kind(detail::get_or<std::string>(j, "kind", ""));
    e.timestamp = detail::get_or<std::string>(j, "timestamp", "");
    e.session_id = detail::get_or<std::string>(j, "session_id", "");
    e.concern = detail::get_or<std::string>(p, "concern", "");
    e.new_name = detail::get_or<std::string>(p, "new_name", "");
    e.attribute_id = detail::get_or<std::string>(p, "attribute_id", "");
    if (p.contains("index") && !p.at("index").is_null()) {
        const auto idx = detail::get_or<std::int64_t>(p, "index", 0);
        if (idx < 0) fail(ErrorCode::InvalidParams, "index must be non-negative");
        e.index = static_cast<std::size_t>(idx);
    }
    e.members = detail::get_or<std::vector<std::string>>(p, "members", {});
    return e;
}

} // namespace viva
