#pragma once

/**
 * @file ingest.hpp
 * @brief CSV ingestion against the schema configuration.
 */

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "viva/config.hpp"
#include "viva/tabular.hpp"

namespace viva {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: comma separated, `"` quoting with `""` escapes, LF or
/// CRLF line ends. Blank lines are skipped. Throws MalformedCsv on an
/// unterminated quote.
inline std::vector<CsvRow> read_csv(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    std::size_t line = 1;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field.empty() && !field_was_quoted) {
                quoted = true;
                field_was_quoted = true;
            } else {
                field += c;
            }
            break;
        case ',': end_field(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            end_row();
            ++line;
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default: field += c;
        }
    }
    if (quoted) fail(ErrorCode::MalformedCsv, "unterminated quoted field at line " + std::to_string(line));
    if (!field.empty() || !row.empty() || field_was_quoted) end_row();
    return rows;
}

namespace detail {

inline void apply_merges(std::string& level, const std::unordered_map<std::string, std::string>& merge_map) {
    if (auto it = merge_map.find(level); it != merge_map.end()) level = it->second;
}

inline CellValue convert_cell(std::string_view raw, const SchemaEntry* entry,
                              const std::unordered_map<std::string, std::string>& merge_map) {
    if (!entry) {
        if (trim(raw).empty()) return Missing{};
        return Text{std::string(raw)};
    }
    switch (entry->kind) {
    case AttributeKind::categorical:
    case AttributeKind::ordered: {
        auto cell = std::get<Category>(normalize_level(raw));
        apply_merges(cell.value, merge_map);
        return cell;
    }
    case AttributeKind::list: {
        const auto sep = entry->list_separator.value_or("|");
        std::vector<std::string> parts;
        if (trim(raw).empty()) parts.emplace_back(kNullLevel);
        else {
            std::size_t start = 0;
            while (true) {
                const auto pos = raw.find(sep, start);
                const auto piece = trim(raw.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                                        : pos - start));
                if (!piece.empty()) {
                    auto v = std::get<Category>(normalize_level(piece)).value;
                    apply_merges(v, merge_map);
                    parts.push_back(std::move(v));
                }
                if (pos == std::string_view::npos) break;
                start = pos + sep.size();
            }
        }
        return make_list(std::move(parts));
    }
    case AttributeKind::quantitative: {
        auto t = trim(raw);
        if (entry->units == "percent" && !t.empty() && t.back() == '%') t.remove_suffix(1);
        if (auto v = parse_number(t)) return make_number(*v);
        return Missing{};
    }
    case AttributeKind::datetime:
        if (auto ts = parse_timestamp(raw)) return Timestamp{*ts};
        return Missing{};
    case AttributeKind::freeform:
        if (trim(raw).empty()) return Missing{};
        return Text{std::string(raw)};
    }
    return Missing{};
}

/// Distinct observed levels, most frequent first, ties alphabetical.
inline std::vector<std::string> levels_by_count(const Column& column) {
    const auto counts = level_counts(column);
    std::vector<std::string> levels;
    levels.reserve(counts.size());
    for (const auto& [k, _] : counts) levels.push_back(k);
    std::sort(levels.begin(), levels.end(), [&](const auto& a, const auto& b) {
        const auto ca = counts.at(a), cb = counts.at(b);
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return levels;
}

} // namespace detail

inline std::string original_attribute_id(std::string_view dataset, std::string_view column) {
    return std::string(dataset) + "." + std::string(column);
}

/// Builds the base dataset `dataset_name` from CSV text. Columns the schema
/// does not mention become freeform (not chartable). Specified merge rules
/// are applied to level values here, before levels are collected.
inline Dataset parse_csv(std::string_view bytes, const std::string& dataset_name, const SchemaConfig& schema,
                         std::span<const MergeRule> merges = {}) {
    const auto entries = schema.entries_for(dataset_name);
    const SchemaEntry* time_entry = nullptr;
    for (const auto* e : entries)
        if (e->time_designation) time_entry = e;
    if (!time_entry) fail(ErrorCode::NoTimeAttribute, "schema has no time attribute for dataset " + dataset_name);

    const auto rows = read_csv(bytes);
    if (rows.empty()) fail(ErrorCode::MalformedCsv, "CSV for " + dataset_name + " has no header row");
    const auto& header = rows.front();
    std::vector<std::string> names;
    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
        auto n = std::string(trim(h));
        if (n.empty()) fail(ErrorCode::MalformedCsv, "empty column name in header of " + dataset_name);
        if (!seen.insert(n).second) fail(ErrorCode::MalformedCsv, "duplicate column '" + n + "' in " + dataset_name);
        names.push_back(std::move(n));
    }
    for (const auto* e : entries)
        if (!seen.count(e->attribute_name))
            fail(ErrorCode::MissingColumn, "column '" + e->attribute_name + "' missing from " + dataset_name,
                 {{"column", e->attribute_name}, {"dataset", dataset_name}});

    const std::size_t ncols = names.size();
    const std::size_t nrows = rows.size() - 1;
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != ncols)
            fail(ErrorCode::MalformedCsv, "row " + std::to_string(r) + " of " + dataset_name + " has " +
                                              std::to_string(rows[r].size()) + " fields, expected " +
                                              std::to_string(ncols));

    std::vector<AttributeDef> attrs;
    std::vector<ColumnPtr> cols;
    for (std::size_t c = 0; c < ncols; ++c) {
        const auto* entry = schema.find(dataset_name, names[c]);
        std::unordered_map<std::string, std::string> merge_map;
        for (const auto& m : merges)
            if (m.dataset == dataset_name && m.attribute == names[c])
                for (const auto& l : m.constituent_levels) merge_map[l] = m.merged_level_name;
        Column col;
        col.reserve(nrows);
        for (std::size_t r = 1; r < rows.size(); ++r) col.push_back(detail::convert_cell(rows[r][c], entry, merge_map));
        AttributeDef def;
        def.id = original_attribute_id(dataset_name, names[c]);
        def.name = names[c];
        def.kind = entry ? entry->kind : AttributeKind::freeform;
        if (entry) def.units = entry->units;
        def.origin = Origin::original;
        def.dataset_id = dataset_name;
        def.chartable = def.kind != AttributeKind::freeform;
        def.config_name = names[c];
        if (has_levels(def.kind)) def.levels = detail::levels_by_count(col);
        attrs.push_back(std::move(def));
        cols.push_back(std::make_shared<const Column>(std::move(col)));
    }
    return Dataset(dataset_name, dataset_name, std::move(attrs), std::move(cols),
                   original_attribute_id(dataset_name, time_entry->attribute_name));
}

} // namespace viva
