#pragma once

/**
 * @file concerns.hpp
 * @brief Attribute groups controlling what the Multiples Panel shows.
 *
 * The default Concern is not stored: it is recomputed from the engine's
 * attribute order, so it always lists every chartable attribute.
 */

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "viva/config.hpp"
#include "viva/engine.hpp"
#include "viva/records.hpp"

namespace viva {

inline constexpr std::string_view kDefaultConcern = "All Attributes";

enum class ConcernOrigin { default_concern, specified, logged, exploded };

inline std::string_view to_string(ConcernOrigin o) {
    switch (o) {
    case ConcernOrigin::default_concern: return "default";
    case ConcernOrigin::specified: return "specified";
    case ConcernOrigin::logged: return "logged";
    case ConcernOrigin::exploded: return "exploded";
    }
    return "logged";
}

struct Concern {
    std::string name;
    std::vector<std::string> members;
    ConcernOrigin origin = ConcernOrigin::logged;
    bool operator==(const Concern&) const = default;
};

struct ConcernSet {
    std::vector<Concern> concerns;
    std::string active{kDefaultConcern};

    Concern* find(std::string_view name) {
        for (auto& c : concerns)
            if (c.name == name) return &c;
        return nullptr;
    }
    const Concern* find(std::string_view name) const { return const_cast<ConcernSet*>(this)->find(name); }

    bool has_name(std::string_view name) const { return name == kDefaultConcern || find(name) != nullptr; }

    bool operator==(const ConcernSet&) const = default;
};

inline Concern default_concern(const EngineState& state) {
    Concern c{std::string(kDefaultConcern), {}, ConcernOrigin::default_concern};
    for (const auto& ds : state.dataset_order)
        for (const auto& a : state.attribute_order(ds))
            if (a.chartable) c.members.push_back(a.id);
    return c;
}

inline bool is_chartable_attribute(const EngineState& state, std::string_view id) {
    for (const auto& ds : state.dataset_order) {
        const auto& d = state.derived.at(ds);
        if (auto i = d.find(id)) return d.attribute_at(*i).chartable;
    }
    return false;
}

/// Default plus stored Concerns, default first.
inline std::vector<Concern> all_concerns(const ConcernSet& set, const EngineState& state) {
    std::vector<Concern> out{default_concern(state)};
    out.insert(out.end(), set.concerns.begin(), set.concerns.end());
    return out;
}

/// Specified Concerns resolved against the ingested attributes; unknown or
/// non-chartable references are dropped and reported.
inline ConcernSet initial_concerns(const std::vector<ConcernSpec>& specs, const EngineState& state,
                                   std::vector<std::string>* warnings = nullptr) {
    ConcernSet set;
    for (const auto& spec : specs) {
        if (set.has_name(spec.name)) {
            if (warnings) warnings->push_back("duplicate concern '" + spec.name + "' ignored");
            continue;
        }
        Concern c{spec.name, {}, ConcernOrigin::specified};
        for (const auto& m : spec.members) {
            if (!is_chartable_attribute(state, m)) {
                if (warnings) warnings->push_back("concern '" + spec.name + "': unknown attribute " + m);
                continue;
            }
            if (!detail::contains(c.members, m)) c.members.push_back(m);
        }
        set.concerns.push_back(std::move(c));
    }
    return set;
}

namespace detail {

inline Concern& editable(ConcernSet& set, std::string_view name) {
    if (name == kDefaultConcern)
        fail(ErrorCode::ProtectedConcern, "the default Concern cannot be edited", {{"concern", name}});
    auto* c = set.find(name);
    if (!c) fail(ErrorCode::UnknownConcern, "unknown concern '" + std::string(name) + "'", {{"concern", name}});
    return *c;
}

inline void require_new_name(const ConcernSet& set, std::string_view name) {
    if (trim(name).empty()) fail(ErrorCode::InvalidParams, "concern name is empty");
    if (set.has_name(name))
        fail(ErrorCode::DuplicateName, "a concern named '" + std::string(name) + "' already exists", {{"concern", name}});
}

inline void require_member_attribute(const EngineState& state, std::string_view id) {
    if (!is_chartable_attribute(state, id))
        fail(ErrorCode::UnknownMember, "unknown or non-chartable attribute '" + std::string(id) + "'",
             {{"attribute_id", id}});
}

inline std::string unique_concern_name(const ConcernSet& set, const std::string& wanted) {
    if (!set.has_name(wanted)) return wanted;
    for (int k = 2;; ++k) {
        auto candidate = wanted + " (" + std::to_string(k) + ")";
        if (!set.has_name(candidate)) return candidate;
    }
}

} // namespace detail

/// Applies one edit; throws on any precondition failure and leaves `set`
/// unchanged in that case.
inline void edit_concern(ConcernSet& set, const EngineState& state, const ConcernEdit& edit) {
    ConcernSet next = set;
    switch (edit.kind) {
    case ConcernEditKind::Create: {
        detail::require_new_name(next, edit.concern);
        Concern c{edit.concern, {}, ConcernOrigin::logged};
        for (const auto& m : edit.members) {
            detail::require_member_attribute(state, m);
            if (!detail::contains(c.members, m)) c.members.push_back(m);
        }
        next.concerns.push_back(std::move(c));
        break;
    }
    case ConcernEditKind::Copy: {
        std::vector<std::string> members;
        if (edit.concern == kDefaultConcern) members = default_concern(state).members;
        else if (const auto* src = next.find(edit.concern)) members = src->members;
        else fail(ErrorCode::UnknownConcern, "unknown concern '" + edit.concern + "'", {{"concern", edit.concern}});
        detail::require_new_name(next, edit.new_name);
        next.concerns.push_back({edit.new_name, std::move(members), ConcernOrigin::logged});
        break;
    }
    case ConcernEditKind::Rename: {
        auto& c = detail::editable(next, edit.concern);
        if (edit.new_name != edit.concern) detail::require_new_name(next, edit.new_name);
        c.name = edit.new_name;
        if (next.active == edit.concern) next.active = edit.new_name;
        break;
    }
    case ConcernEditKind::Delete: {
        detail::editable(next, edit.concern);
        std::erase_if(next.concerns, [&](const Concern& c) { return c.name == edit.concern; });
        if (next.active == edit.concern) next.active = std::string(kDefaultConcern);
        break;
    }
    case ConcernEditKind::AddMember: {
        auto& c = detail::editable(next, edit.concern);
        detail::require_member_attribute(state, edit.attribute_id);
        if (detail::contains(c.members, edit.attribute_id)) break;
        const auto pos = edit.index.value_or(c.members.size());
        if (pos > c.members.size()) fail(ErrorCode::InvalidParams, "member index out of range");
        c.members.insert(c.members.begin() + static_cast<std::ptrdiff_t>(pos), edit.attribute_id);
        break;
    }
    case ConcernEditKind::RemoveMember: {
        auto& c = detail::editable(next, edit.concern);
        auto it = std::find(c.members.begin(), c.members.end(), edit.attribute_id);
        if (it == c.members.end())
            fail(ErrorCode::UnknownMember, "'" + edit.attribute_id + "' is not a member of '" + edit.concern + "'",
                 {{"attribute_id", edit.attribute_id}});
        c.members.erase(it);
        break;
    }
    case ConcernEditKind::MoveMember: {
        auto& c = detail::editable(next, edit.concern);
        auto it = std::find(c.members.begin(), c.members.end(), edit.attribute_id);
        if (it == c.members.end())
            fail(ErrorCode::UnknownMember, "'" + edit.attribute_id + "' is not a member of '" + edit.concern + "'",
                 {{"attribute_id", edit.attribute_id}});
        if (!edit.index || *edit.index >= c.members.size())
            fail(ErrorCode::InvalidParams, "MoveMember needs an index within the concern");
        c.members.erase(it);
        c.members.insert(c.members.begin() + static_cast<std::ptrdiff_t>(*edit.index), edit.attribute_id);
        break;
    }
    case ConcernEditKind::SetActive:
        if (!next.has_name(edit.concern))
            fail(ErrorCode::UnknownConcern, "unknown concern '" + edit.concern + "'", {{"concern", edit.concern}});
        next.active = edit.concern;
        break;
    }
    set = std::move(next);
}

/// New attributes go right after their source in the active Concern, or at
/// its end when the source is not a member. The default Concern follows the
/// engine's attribute order on its own.
inline void on_attribute_created(ConcernSet& set, const std::string& source_attr,
                                 const std::vector<std::string>& new_attrs) {
    auto* c = set.find(set.active);
    if (!c) return;
    auto it = std::find(c->members.begin(), c->members.end(), source_attr);
    if (it == c->members.end()) {
        for (const auto& a : new_attrs)
            if (!detail::contains(c->members, a)) c->members.push_back(a);
        return;
    }
    auto pos = std::next(it);
    for (const auto& a : new_attrs) {
        if (detail::contains(c->members, a)) continue;
        pos = std::next(c->members.insert(pos, a));
    }
}

/// The Concern an Explode creates: both source attributes followed by the
/// derived ones. It becomes active. Returns its name.
inline std::string on_explode(ConcernSet& set, const AttributeDef& bars, const AttributeDef& segments,
                              const std::vector<std::string>& derived) {
    const auto name = detail::unique_concern_name(set, bars.name + " \xC3\x97 " + segments.name);
    Concern c{name, {bars.id, segments.id}, ConcernOrigin::exploded};
    c.members.insert(c.members.end(), derived.begin(), derived.end());
    set.concerns.push_back(std::move(c));
    set.active = name;
    return name;
}

/// Drops members whose attribute no longer exists.
inline void prune_members(ConcernSet& set, const EngineState& state) {
    for (auto& c : set.concerns)
        std::erase_if(c.members, [&](const std::string& m) { return !is_chartable_attribute(state, m); });
    if (!set.has_name(set.active)) set.active = std::string(kDefaultConcern);
}

} // namespace viva
