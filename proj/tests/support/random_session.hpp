#pragma once

// Random datasets, operations and Concern edits for property tests.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "viva/session.hpp"
#include "support/fixtures.hpp"

namespace vt {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[uniform(rng, v.size())];
}

inline const std::string kRandomSchema = R"(# random test schema
R.When: datetime time
R.C1: categorical
R.C2: categorical
R.C3: categorical
R.C4: categorical
R.O1: ordered
R.L1: list
R.Q1: numerical units=u
R.Q2: percent
)";

/// CSV text for dataset "R" with the columns of kRandomSchema plus a
/// freeform Notes column that the schema does not mention.
inline std::string random_csv(Rng& rng, std::size_t rows) {
    static const std::vector<std::string> pool = {"a", "b", "c", "d", "Red", "Green", "x y", "HLBCYellow", "e", "NULL", ""};
    auto levels = [&](std::size_t max) {
        std::vector<std::string> out;
        const auto n = 1 + uniform(rng, max);
        for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng, pool));
        return out;
    };
    const std::vector<std::vector<std::string>> cats = {levels(3), levels(6), levels(8), levels(2)};
    const auto day0 = viva::day_number(*viva::parse_date("2021-01-01"));
    const auto span = 1 + uniform(rng, 120);
    std::string csv = "When,C1,C2,C3,C4,O1,L1,Q1,Q2,Notes\n";
    char buf[64];
    for (std::size_t r = 0; r < rows; ++r) {
        std::string line;
        if (coin(rng, 0.03)) line += "";
        else {
            const auto t = static_cast<std::int64_t>(day0 + static_cast<std::int32_t>(uniform(rng, span))) * 86400 +
                           static_cast<std::int64_t>(uniform(rng, 86400));
            line += viva::format_timestamp(t);
        }
        for (const auto& c : cats) line += "," + pick(rng, c);
        line += "," + (coin(rng, 0.05) ? std::string() : std::to_string(1 + uniform(rng, 5)));
        {
            std::string l;
            const auto n = uniform(rng, 4);
            static const std::vector<std::string> items = {"x", "y", "z", "w"};
            for (std::size_t i = 0; i < n; ++i) l += (i ? "|" : "") + pick(rng, items);
            line += "," + l;
        }
        if (coin(rng, 0.05)) line += ",";
        else {
            std::snprintf(buf, sizeof buf, ",%.3f", std::uniform_real_distribution<double>(-50, 250)(rng));
            line += buf;
        }
        if (coin(rng, 0.1)) line += ",n/a";
        else {
            std::snprintf(buf, sizeof buf, ",%d%%", static_cast<int>(uniform(rng, 101)));
            line += buf;
        }
        line += ",note " + std::to_string(r);
        csv += line + "\n";
    }
    return csv;
}

inline viva::Dataset random_dataset(Rng& rng, std::size_t max_rows) {
    return load(random_csv(rng, uniform(rng, max_rows + 1)), "R", kRandomSchema);
}

/// A store with an ordering rule so custom orders get exercised.
inline viva::ConfigStore random_store() {
    viva::ConfigStore s;
    s.schema = schema_of(kRandomSchema);
    s.orderings.push_back({"R", "C2", {"e", "d", "c", "b", "a"}});
    s.colors.push_back({"R", "C1", "a", "#123456"});
    return s;
}

inline std::vector<std::string> subset(Rng& rng, const std::vector<std::string>& v, std::size_t min_size = 0) {
    std::vector<std::string> out;
    for (const auto& x : v)
        if (coin(rng)) out.push_back(x);
    while (out.size() < min_size && out.size() < v.size()) {
        const auto& x = pick(rng, v);
        if (!viva::detail::contains(out, x)) out.push_back(x);
    }
    return out;
}

struct OpWeights {
    double explode = 0.06;
};

/// A candidate operation request; it may still fail validation.
inline viva::Operation random_op(Rng& rng, const viva::EngineState& s, const std::string& ds_id,
                                 const OpWeights& w = {}) {
    const auto& ds = s.dataset(ds_id);
    std::vector<const viva::AttributeDef*> levelled, strat, any;
    for (const auto& a : ds.attributes()) {
        if (!a.chartable) continue;
        any.push_back(&a);
        if (viva::has_levels(a.kind) && !a.levels.empty()) levelled.push_back(&a);
        if (viva::is_stratifiable(a.kind) && !a.levels.empty() && a.levels.size() <= 8) strat.push_back(&a);
    }
    viva::Operation op;
    op.dataset_id = ds_id;
    op.mode = coin(rng) ? viva::EditMode::MakeNew : viva::EditMode::ModifyCurrent;
    static const std::vector<std::string> fresh = {"m1", "m2", "old", "a", "Red", "NULL"};
    auto new_level_name = [&](const viva::AttributeDef& a) {
        if (coin(rng, 0.3) && !a.levels.empty()) return pick(rng, a.levels);
        return pick(rng, fresh);
    };
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (u < w.explode && strat.size() >= 2) {
        const auto* a = pick(rng, strat);
        const auto* b = pick(rng, strat);
        op.kind = viva::OpKind::Explode;
        op.target_attribute_id = a->id;
        op.second_attribute_id = b->id;
        op.mode.reset();
        return op;
    }
    if (levelled.empty() || u > 0.92) {
        const auto* a = pick(rng, any);
        op.target_attribute_id = a->id;
        op.mode.reset();
        if (coin(rng)) {
            op.kind = viva::OpKind::RenameAttribute;
            op.new_name = coin(rng) ? a->name + "*" : "N" + std::to_string(uniform(rng, 4));
        } else {
            op.kind = viva::OpKind::DuplicateAttribute;
        }
        return op;
    }
    const auto* a = pick(rng, levelled);
    op.target_attribute_id = a->id;
    switch (uniform(rng, 4)) {
    case 0:
        op.kind = viva::OpKind::FilterOut;
        op.levels = subset(rng, a->levels, 1);
        if (op.levels.size() == a->levels.size() && coin(rng, 0.8)) op.levels.pop_back();
        if (op.levels.empty()) op.levels.push_back(a->levels.front());
        break;
    case 1:
        op.kind = viva::OpKind::KeepOnly;
        op.levels = subset(rng, a->levels, 1);
        break;
    case 2:
        op.kind = viva::OpKind::MergeLevels;
        op.levels = subset(rng, a->levels, 2);
        op.new_name = new_level_name(*a);
        break;
    default:
        op.kind = viva::OpKind::RenameLevel;
        op.levels = {pick(rng, a->levels)};
        op.new_name = new_level_name(*a);
        break;
    }
    return op;
}

inline viva::ConcernEdit random_concern_edit(Rng& rng, const viva::ConcernSet& set, const viva::EngineState& s) {
    static const std::vector<std::string> names = {"K1", "K2", "K3", "Mine", std::string(viva::kDefaultConcern)};
    std::vector<std::string> attrs;
    for (const auto& c : viva::default_concern(s).members) attrs.push_back(c);
    std::vector<std::string> existing{std::string(viva::kDefaultConcern)};
    for (const auto& c : set.concerns) existing.push_back(c.name);
    viva::ConcernEdit e;
    e.kind = static_cast<viva::ConcernEditKind>(uniform(rng, 8));
    e.concern = coin(rng, 0.8) ? pick(rng, existing) : pick(rng, names);
    switch (e.kind) {
    case viva::ConcernEditKind::Create:
        e.concern = pick(rng, names);
        if (!attrs.empty()) e.members = subset(rng, attrs);
        break;
    case viva::ConcernEditKind::Copy:
    case viva::ConcernEditKind::Rename: e.new_name = pick(rng, names); break;
    case viva::ConcernEditKind::AddMember:
        if (!attrs.empty()) e.attribute_id = pick(rng, attrs);
        if (coin(rng)) e.index = uniform(rng, 4);
        break;
    case viva::ConcernEditKind::RemoveMember:
    case viva::ConcernEditKind::MoveMember: {
        if (const auto* c = set.find(e.concern); c && !c->members.empty() && coin(rng, 0.9))
            e.attribute_id = pick(rng, c->members);
        else if (!attrs.empty()) e.attribute_id = pick(rng, attrs);
        e.index = uniform(rng, 4);
        break;
    }
    default: break;
    }
    return e;
}

/// An interactive session run against the engine and Concern functions the
/// way the server drives them, with all records kept in an in-memory store.
struct RandomSession {
    viva::ConfigStore store;
    std::vector<viva::Dataset> bases;
    viva::EngineState engine;
    viva::ConcernSet concerns;
    std::int64_t seq = 0;
    std::size_t explodes = 0;
    std::size_t rejected = 0;

    RandomSession(viva::ConfigStore st, std::vector<viva::Dataset> b) : store(std::move(st)), bases(std::move(b)) {
        engine = viva::EngineState::from_base(bases);
        concerns = viva::initial_concerns(store.concerns_spec, engine);
    }

    /// Applies one candidate; returns false if it was rejected.
    bool try_op(viva::Operation op) {
        op.seq = seq + 1;
        try {
            auto r = viva::apply(engine, std::move(op), viva::level_order_for(store));
            ++seq;
            viva::apply_concern_effects(concerns, engine, r.op, r.source_attribute_id);
            viva::append_logged(store, r.op);
            if (r.op.kind == viva::OpKind::Explode) ++explodes;
            return true;
        } catch (const viva::Error&) {
            ++rejected;
            return false;
        }
    }

    bool try_edit(viva::ConcernEdit e) {
        e.seq = seq + 1;
        try {
            viva::edit_concern(concerns, engine, e);
            ++seq;
            viva::append_logged(store, e);
            return true;
        } catch (const viva::Error&) {
            ++rejected;
            return false;
        }
    }

    /// Runs until `ops` operations have been applied (or attempts run out).
    void run(Rng& rng, std::size_t ops, double edit_rate = 0.2, const OpWeights& w = {}) {
        std::size_t applied = 0;
        for (std::size_t attempt = 0; applied < ops && attempt < ops * 20; ++attempt) {
            if (coin(rng, edit_rate)) {
                try_edit(random_concern_edit(rng, concerns, engine));
                continue;
            }
            const auto& ds = pick(rng, engine.dataset_order);
            if (try_op(random_op(rng, engine, ds, w))) ++applied;
        }
    }

    nlohmann::json catalog() const { return viva::catalog_json(engine, concerns, store, viva::full_range(engine)); }
};

} // namespace vt
