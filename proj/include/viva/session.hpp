#pragma once

/**
 * @file session.hpp
 * @brief One analysis session: uploaded base data, the derived state, the
 * Concerns, the active time range and the config store, plus the catalog
 * and chart views the HTTP layer serves.
 *
 * Writers are serialized on a mutex and publish immutable snapshots; readers
 * only ever touch a snapshot.
 */

#include <chrono>
#include <cstdio>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "viva/analytics.hpp"
#include "viva/concerns.hpp"
#include "viva/config.hpp"
#include "viva/engine.hpp"
#include "viva/ingest.hpp"
#include "viva/svg.hpp"

namespace viva {

/// A logged record that could not be re-applied on load. It stays in its
/// log file and is retried on the next upload.
struct Suspension {
    std::int64_t seq = 0;
    std::string record; // "operation" or "concern_edit"
    std::string cause;
    std::string message;
};

inline nlohmann::json to_json(const Suspension& s) {
    return {{"seq", s.seq}, {"record", s.record}, {"cause", s.cause}, {"message", s.message}};
}

struct Rebuilt {
    EngineState engine;
    ConcernSet concerns;
    std::vector<Suspension> suspended;
    /// Operations on datasets not uploaded in this session.
    std::vector<std::int64_t> dormant;
    std::vector<std::string> warnings;
};

inline LevelOrder level_order_for(const ConfigStore& store) {
    return [&store](const AttributeDef& a, const Column& c) { return resolve_level_order(store, a, c); };
}

/// Concern bookkeeping that follows an applied operation.
inline void apply_concern_effects(ConcernSet& set, const EngineState& state, const Operation& op,
                                  const std::string& source) {
    if (op.created_attribute_ids.empty()) return;
    if (op.kind == OpKind::Explode) {
        const auto& ds = state.dataset(op.dataset_id);
        on_explode(set, ds.attribute(op.target_attribute_id), ds.attribute(op.second_attribute_id),
                   op.created_attribute_ids);
    } else {
        on_attribute_created(set, source, op.created_attribute_ids);
    }
}

/// Ingested base datasets plus both logs, merged by seq. Records that fail
/// are suspended instead of aborting the load.
inline Rebuilt rebuild(const ConfigStore& store, std::vector<Dataset> bases) {
    Rebuilt out;
    out.engine = EngineState::from_base(std::move(bases));
    out.concerns = initial_concerns(store.concerns_spec, out.engine, &out.warnings);
    std::size_t i = 0, j = 0;
    const auto& ops = store.logged_ops;
    const auto& edits = store.logged_concern_edits;
    while (i < ops.size() || j < edits.size()) {
        const bool take_op = j >= edits.size() || (i < ops.size() && ops[i].seq < edits[j].seq);
        if (take_op) {
            const auto& op = ops[i++];
            if (!out.engine.derived.count(op.dataset_id)) {
                out.dormant.push_back(op.seq);
                continue;
            }
            try {
                const auto source = replay_one(out.engine, op);
                apply_concern_effects(out.concerns, out.engine, op, source);
            } catch (const Error& e) {
                const auto cause = e.details().is_object() && e.details().contains("cause")
                                       ? e.details().at("cause").get<std::string>()
                                       : std::string(to_string(e.code()));
                out.suspended.push_back({op.seq, "operation", cause, e.what()});
            }
        } else {
            const auto& edit = edits[j++];
            try {
                edit_concern(out.concerns, out.engine, edit);
            } catch (const Error& e) {
                out.suspended.push_back({edit.seq, "concern_edit", std::string(to_string(e.code())), e.what()});
            }
        }
    }
    return out;
}

/// Union of the datasets' day extents; 1970-01-01 when there are no rows.
inline TimeRange full_range(const EngineState& state) {
    std::optional<std::pair<std::int32_t, std::int32_t>> ext;
    for (const auto& id : state.dataset_order) {
        const auto e = state.base.at(id)->day_extent();
        if (!e) continue;
        if (!ext) ext = e;
        else ext = std::pair{std::min(ext->first, e->first), std::max(ext->second, e->second)};
    }
    if (!ext) return TimeRange(date_from_day(0), date_from_day(0));
    return TimeRange(date_from_day(ext->first), date_from_day(ext->second));
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json attribute_json(const AttributeDef& a, const Column& col, const ConfigStore& store) {
    nlohmann::json j = {{"id", a.id},
                        {"name", a.name},
                        {"kind", to_string(a.kind)},
                        {"origin", to_string(a.origin)},
                        {"chartable", a.chartable},
                        {"config_name", a.config_name}};
    if (a.units) j["units"] = *a.units;
    if (has_levels(a.kind)) {
        const auto counts = level_counts(col);
        nlohmann::json levels = nlohmann::json::array();
        for (const auto& l : resolve_level_order(store, a, col)) {
            const auto it = counts.find(l);
            levels.push_back({{"level", l},
                              {"count", it == counts.end() ? 0 : it->second},
                              {"color", resolve_color(store, a, l)}});
        }
        j["levels"] = levels;
    }
    return j;
}

/// Session-independent description of the derived state. Contains no
/// timestamps or session ids, so equal states serialize to equal bytes.
inline nlohmann::json catalog_json(const EngineState& state, const ConcernSet& concerns, const ConfigStore& store,
                                   const TimeRange& range) {
    nlohmann::json datasets = nlohmann::json::array();
    for (const auto& id : state.dataset_order) {
        const auto& ds = state.derived.at(id);
        nlohmann::json attrs = nlohmann::json::array();
        for (std::size_t i = 0; i < ds.attributes().size(); ++i)
            attrs.push_back(attribute_json(ds.attribute_at(i), ds.column_at(i), store));
        datasets.push_back({{"id", ds.id()},
                            {"name", ds.name()},
                            {"row_count", ds.row_count()},
                            {"time_attribute", ds.time_attribute()},
                            {"fingerprint", hex64(fingerprint(ds))},
                            {"attributes", attrs}});
    }
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : all_concerns(concerns, state))
        cs.push_back({{"name", c.name}, {"origin", to_string(c.origin)}, {"members", c.members}});
    return {{"datasets", datasets},
            {"concerns", cs},
            {"active_concern", concerns.active},
            {"active_range", {{"start", format_date(range.start())}, {"end", format_date(range.end())}}}};
}

struct UploadFile {
    std::string dataset_name;
    std::string bytes;
};

struct ChartRequest {
    std::string mode; // rollup | histogram | partition | stratify | flow
    std::string dataset_id;
    std::vector<std::string> attributes;
    Granularity granularity = Granularity::day;
    ValueMode value_mode = ValueMode::absolute;
    bool accumulate = false;
    std::size_t bins = 20;
};

struct SessionSnapshot {
    EngineState engine;
    ConcernSet concerns;
    TimeRange range{date_from_day(0), date_from_day(0)};
    std::vector<Suspension> suspended;
    std::vector<std::int64_t> dormant;
    std::vector<std::string> warnings;
};

inline std::string make_session_id() {
    std::random_device rd;
    const auto v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    return hex64(v);
}

inline std::string now_timestamp() {
    const auto s = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch());
    auto t = format_timestamp(s.count());
    t[10] = 'T';
    return t + "Z";
}

class Session {
public:
    explicit Session(LoadedConfig cfg, std::string session_id = make_session_id())
        : store_(std::move(cfg.store)), diagnostics_(std::move(cfg.diagnostics)), session_id_(std::move(session_id)),
          snap_(std::make_shared<const SessionSnapshot>()) {}

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const std::string& session_id() const { return session_id_; }

    std::shared_ptr<const SessionSnapshot> snapshot() const {
        std::lock_guard lk(snap_mu_);
        return snap_;
    }

    /// Ingests the files (replacing datasets of the same name) and rebuilds
    /// the derived state from both logs. Returns the catalog.
    nlohmann::json upload(const std::vector<UploadFile>& files) {
        std::lock_guard wl(write_mu_);
        if (files.empty()) fail(ErrorCode::BadRequest, "no CSV files in upload");
        std::map<std::string, Dataset> incoming;
        nlohmann::json problems = nlohmann::json::array();
        std::optional<ErrorCode> first;
        for (const auto& f : files) {
            try {
                if (incoming.count(f.dataset_name)) fail(ErrorCode::BadRequest, "dataset uploaded twice");
                incoming.emplace(f.dataset_name, parse_csv(f.bytes, f.dataset_name, store_.schema, store_.merges));
            } catch (const Error& e) {
                if (!first) first = e.code();
                problems.push_back({{"dataset", f.dataset_name}, {"code", to_string(e.code())}, {"message", e.what()},
                                    {"details", e.details()}});
            }
        }
        if (first) fail(*first, "upload rejected", {{"diagnostics", problems}});
        const auto cur = snapshot();
        for (const auto& id : cur->engine.dataset_order)
            if (!incoming.count(id)) incoming.emplace(id, *cur->engine.base.at(id));
        std::vector<Dataset> ordered;
        for (const auto& name : store_.schema.dataset_names())
            if (auto it = incoming.find(name); it != incoming.end()) ordered.push_back(std::move(it->second));
        auto next = from_rebuilt(rebuild(store_, std::move(ordered)));
        next.range = full_range(next.engine);
        publish(std::move(next));
        return catalog();
    }

    nlohmann::json catalog() const {
        const auto s = snapshot();
        return catalog_of(*s);
    }

    void set_range(const TimeRange& r) {
        std::lock_guard wl(write_mu_);
        auto next = *snapshot();
        next.range = r;
        publish(std::move(next));
    }

    /// Assigns seq and the default mode, applies, logs. Returns the applied
    /// operation and created ids.
    nlohmann::json apply_op(Operation op) {
        std::lock_guard wl(write_mu_);
        auto next = *snapshot();
        op.seq = next_seq();
        op.timestamp = now_timestamp();
        op.session_id = session_id_;
        op.created_attribute_ids.clear();
        if (is_level_edit(op.kind) && !op.mode)
            op.mode = customized_.count(op.target_attribute_id) ? EditMode::ModifyCurrent : EditMode::MakeNew;
        auto r = apply(next.engine, std::move(op), level_order_for(store_));
        apply_concern_effects(next.concerns, next.engine, r.op, r.source_attribute_id);
        append_logged(store_, r.op);
        customized_.insert(r.op.target_attribute_id);
        customized_.insert(r.created_attribute_ids.begin(), r.created_attribute_ids.end());
        publish(std::move(next));
        return {{"seq", r.op.seq}, {"created_attribute_ids", r.created_attribute_ids}, {"operation", to_json(r.op)},
                {"active_concern", snapshot()->concerns.active}};
    }

    nlohmann::json edit_concerns(ConcernEdit edit) {
        std::lock_guard wl(write_mu_);
        auto next = *snapshot();
        edit.seq = next_seq();
        edit.timestamp = now_timestamp();
        edit.session_id = session_id_;
        edit_concern(next.concerns, next.engine, edit);
        append_logged(store_, edit);
        publish(std::move(next));
        return {{"seq", edit.seq}, {"edit", to_json(edit)}, {"active_concern", snapshot()->concerns.active}};
    }

    /// Newest first. Applied operations carry their transitive dependents.
    nlohmann::json history() const {
        const auto s = snapshot();
        std::lock_guard wl(write_mu_);
        const auto deps = all_dependents(s->engine.log);
        std::set<std::int64_t> applied;
        for (const auto& op : s->engine.log) applied.insert(op.seq);
        std::set<std::int64_t> dormant(s->dormant.begin(), s->dormant.end());
        nlohmann::json out = nlohmann::json::array();
        for (auto it = store_.logged_ops.rbegin(); it != store_.logged_ops.rend(); ++it) {
            auto j = to_json(*it);
            if (applied.count(it->seq)) {
                j["status"] = "applied";
                j["dependents"] = deps.at(it->seq);
            } else {
                j["status"] = dormant.count(it->seq) ? "dormant" : "suspended";
                j["dependents"] = nlohmann::json::array();
            }
            out.push_back(std::move(j));
        }
        return out;
    }

    /// Removes `seq`; with cascade its dependents go too, otherwise any
    /// dependents make it a DependencyViolation.
    nlohmann::json remove(std::int64_t seq, bool cascade) {
        std::lock_guard wl(write_mu_);
        return remove_locked(seq, cascade);
    }

    nlohmann::json undo() {
        std::lock_guard wl(write_mu_);
        const auto s = snapshot();
        if (s->engine.log.empty()) fail(ErrorCode::EmptyLog, "nothing to undo");
        return remove_locked(s->engine.log.back().seq, false);
    }

    nlohmann::json chart(const ChartRequest& req) const {
        const auto s = snapshot();
        return std::visit([](const auto& r) { return to_json(r); }, compute(*s, req));
    }

    std::string export_svg(const ChartRequest& req) const {
        const auto s = snapshot();
        const auto result = compute(*s, req);
        if (const auto* ct = std::get_if<CrossTabResult>(&result))
            return svg::render(*ct, req.value_mode == ValueMode::percentage);
        return std::visit([](const auto& r) { return svg::render(r); }, result);
    }

    const std::vector<LineDiagnostic>& config_diagnostics() const { return diagnostics_; }

    /// For tests: a copy of the store as it is now.
    ConfigStore store() const {
        std::lock_guard wl(write_mu_);
        return store_;
    }

private:
    using AnyResult = std::variant<RollupResult, HistogramResult, PartitionResult, CrossTabResult, SankeyResult>;

    AnyResult compute(const SessionSnapshot& s, const ChartRequest& req) const {
        if (req.attributes.empty()) fail(ErrorCode::InvalidParams, "chart needs at least one attribute");
        std::string ds = req.dataset_id;
        if (ds.empty()) {
            const auto found = s.engine.dataset_of(req.attributes.front());
            if (!found)
                fail(ErrorCode::UnknownAttribute, "unknown attribute '" + req.attributes.front() + "'",
                     {{"attribute_id", req.attributes.front()}});
            ds = *found;
        }
        auto one = [&] {
            if (req.attributes.size() != 1) fail(ErrorCode::WrongArity, req.mode + " takes one attribute");
            return req.attributes.front();
        };
        const auto& e = s.engine;
        if (req.mode == "rollup") return rollup(e, ds, one(), s.range, store_view());
        if (req.mode == "histogram") return histogram(e, ds, one(), s.range, req.bins);
        if (req.mode == "partition")
            return partition(e, ds, one(), s.range, req.granularity, req.value_mode, req.accumulate, store_view());
        if (req.mode == "stratify") {
            if (req.attributes.size() != 2) fail(ErrorCode::WrongArity, "stratify takes two attributes");
            return cross_tab(e, ds, req.attributes[0], req.attributes[1], s.range, store_view());
        }
        if (req.mode == "flow") return sankey(e, ds, req.attributes, s.range, store_view());
        fail(ErrorCode::InvalidParams, "unknown chart mode '" + req.mode + "'");
    }

    // Specified sections never change after startup, so charts may read
    // them without the writer lock.
    const ConfigStore& store_view() const { return store_; }

    nlohmann::json catalog_of(const SessionSnapshot& s) const {
        auto j = catalog_json(s.engine, s.concerns, store_, s.range);
        nlohmann::json susp = nlohmann::json::array();
        for (const auto& x : s.suspended) susp.push_back(to_json(x));
        j["suspended"] = susp;
        j["dormant_ops"] = s.dormant;
        nlohmann::json diags = nlohmann::json::array();
        for (const auto& d : diagnostics_) diags.push_back(to_json(d));
        j["config_diagnostics"] = diags;
        j["warnings"] = s.warnings;
        return j;
    }

    std::int64_t next_seq() {
        const auto s = snapshot();
        issued_ = std::max({issued_, store_.max_seq(), s->engine.last_seq()}) + 1;
        return issued_;
    }

    SessionSnapshot from_rebuilt(Rebuilt r) const {
        SessionSnapshot s;
        s.engine = std::move(r.engine);
        s.concerns = std::move(r.concerns);
        s.suspended = std::move(r.suspended);
        s.dormant = std::move(r.dormant);
        s.warnings = std::move(r.warnings);
        return s;
    }

    nlohmann::json remove_locked(std::int64_t seq, bool cascade) {
        const auto cur = snapshot();
        const auto in_log = std::any_of(store_.logged_ops.begin(), store_.logged_ops.end(),
                                        [&](const Operation& o) { return o.seq == seq; });
        if (!in_log) fail(ErrorCode::UnknownSeq, "no operation with seq " + std::to_string(seq), {{"seq", seq}});
        std::set<std::int64_t> removing{seq};
        const bool applied = std::any_of(cur->engine.log.begin(), cur->engine.log.end(),
                                         [&](const Operation& o) { return o.seq == seq; });
        if (applied) {
            const auto deps = dependents(cur->engine.log, seq);
            if (!deps.empty() && !cascade)
                fail(ErrorCode::DependencyViolation,
                     "operation " + std::to_string(seq) + " has " + std::to_string(deps.size()) + " dependent(s)",
                     {{"seq", seq}, {"dependents", deps}});
            removing.insert(deps.begin(), deps.end());
            remove_ops(cur->engine, removing); // validates the closure
        }
        std::vector<Dataset> bases;
        for (const auto& id : cur->engine.dataset_order) bases.push_back(*cur->engine.base.at(id));
        ConfigStore trial = store_;
        trial.dir.reset();
        trial.logged_ops = without(store_.logged_ops, removing);
        auto next = from_rebuilt(rebuild(trial, std::move(bases)));
        next.range = cur->range;
        rewrite_logged_ops(store_, without(store_.logged_ops, removing));
        publish(std::move(next));
        return {{"removed", removing}};
    }

    void publish(SessionSnapshot s) {
        auto p = std::make_shared<const SessionSnapshot>(std::move(s));
        std::lock_guard lk(snap_mu_);
        snap_ = std::move(p);
    }

    mutable std::mutex write_mu_;
    mutable std::mutex snap_mu_;
    ConfigStore store_;
    std::vector<LineDiagnostic> diagnostics_;
    std::string session_id_;
    std::set<std::string> customized_;
    std::int64_t issued_ = 0;
    std::shared_ptr<const SessionSnapshot> snap_;
};

} // namespace viva
