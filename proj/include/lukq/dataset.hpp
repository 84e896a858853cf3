// Tabular data: schema, CSV ingestion and [0,1] normalisation.
//
// A DataTable holds raw cells.  normalize() turns every variable-bound
// numeric column into degrees by clamped linear rescaling against user
// bounds (m_u, M_u), optionally reversed, producing a NormalizedTable whose
// rows are possible worlds for query evaluation.
#pragma once

#include "lukq/formula.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace lukq {

class HeaderMismatch : public Error {
public:
    using Error::Error;
};

class CellParseError : public Error {
public:
    CellParseError(std::size_t row, std::string column, const std::string& cell)
        : Error("row " + std::to_string(row) + ", column '" + column + "': cannot parse '" + cell + "'"),
          row_(row),
          column_(std::move(column)) {}
    /// 1-based data row (the header is row 0).
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(std::int64_t id) : Error("duplicate row id " + std::to_string(id)) {}
};

class EmptyColumn : public Error {
public:
    explicit EmptyColumn(const std::string& column) : Error("column '" + column + "' has no values") {}
};

class MissingSpec : public Error {
public:
    explicit MissingSpec(std::string column)
        : Error("no normalisation spec for column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class UnknownRow : public Error {
public:
    explicit UnknownRow(std::int64_t id) : Error("no row with id " + std::to_string(id)) {}
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// ── Schema ──────────────────────────────────────────────────────────────────

enum class ColumnKind : std::uint8_t { Numeric, Text };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::optional<std::string> variable;
};

class Schema {
public:
    Schema() = default;
    Schema(std::vector<Column> columns, std::vector<std::string> display = {})
        : columns_(std::move(columns)), display_(std::move(display)) {
        std::set<std::string> vars;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const auto& c = columns_[i];
            if (!is_identifier(c.name)) throw SchemaError("invalid column name '" + c.name + "'");
            if (!index_.emplace(c.name, i).second) throw SchemaError("duplicate column '" + c.name + "'");
            if (c.variable) {
                if (c.kind != ColumnKind::Numeric)
                    throw SchemaError("text column '" + c.name + "' cannot carry a variable");
                if (!is_variable_name(*c.variable))
                    throw SchemaError("invalid variable name '" + *c.variable + "'");
                if (!vars.insert(*c.variable).second)
                    throw SchemaError("variable '" + *c.variable + "' bound twice");
            }
        }
        if (display_.empty())
            for (const auto& c : columns_)
                if (c.kind == ColumnKind::Text) display_.push_back(c.name);
        for (const auto& d : display_)
            if (!index_.count(d)) throw SchemaError("display column '" + d + "' not in schema");
    }

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::vector<std::string>& display() const noexcept { return display_; }

    std::optional<std::size_t> index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    const Column& column(std::string_view name) const {
        auto i = index_of(name);
        if (!i) throw SchemaError("unknown column '" + std::string(name) + "'");
        return columns_[*i];
    }
    /// Column bound to `variable`, if any.
    const Column* column_for_variable(std::string_view variable) const {
        for (const auto& c : columns_)
            if (c.variable && *c.variable == variable) return &c;
        return nullptr;
    }
    std::vector<const Column*> bound_columns() const {
        std::vector<const Column*> out;
        for (const auto& c : columns_)
            if (c.variable) out.push_back(&c);
        return out;
    }

private:
    std::vector<Column> columns_;
    std::vector<std::string> display_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Schema document:
///   {"columns": [{"name": "price", "kind": "numeric", "variable": "X0"}, ...],
///    "display": ["manufacturer", "model", "trim"]}
inline Schema schema_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_array())
        throw SchemaError("schema document needs a \"columns\" array");
    std::vector<Column> cols;
    for (const auto& c : doc["columns"]) {
        Column col;
        col.name = c.at("name").get<std::string>();
        std::string kind = c.value("kind", "numeric");
        if (kind == "numeric")
            col.kind = ColumnKind::Numeric;
        else if (kind == "text")
            col.kind = ColumnKind::Text;
        else
            throw SchemaError("unknown column kind '" + kind + "'");
        if (c.contains("variable") && !c["variable"].is_null()) col.variable = c["variable"].get<std::string>();
        cols.push_back(std::move(col));
    }
    std::vector<std::string> display;
    if (doc.contains("display")) display = doc["display"].get<std::vector<std::string>>();
    return Schema(std::move(cols), std::move(display));
}

inline nlohmann::json schema_to_json(const Schema& s) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : s.columns()) {
        nlohmann::json j{{"name", c.name}, {"kind", c.kind == ColumnKind::Numeric ? "numeric" : "text"}};
        if (c.variable) j["variable"] = *c.variable;
        cols.push_back(std::move(j));
    }
    return {{"columns", cols}, {"display", s.display()}};
}

// ── CSV ─────────────────────────────────────────────────────────────────────

namespace detail {

/// Reads one CSV record (RFC 4180 quoting).  Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

using Cell = std::variant<Rational, std::string>;

struct DataRow {
    std::int64_t id;
    std::vector<Cell> cells;  // schema column order
};

class DataTable {
public:
    DataTable(Schema schema, std::vector<DataRow> rows) : schema_(std::move(schema)), rows_(std::move(rows)) {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (!by_id_.emplace(rows_[i].id, i).second) throw DuplicateId(rows_[i].id);
    }

    const Schema& schema() const noexcept { return schema_; }
    const std::vector<DataRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    const DataRow& row(std::int64_t id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw UnknownRow(id);
        return rows_[it->second];
    }

    /// Exact values of a numeric column, in row order.
    std::vector<Rational> numeric_column(std::string_view name) const {
        const auto idx = schema_.index_of(name);
        if (!idx) throw SchemaError("unknown column '" + std::string(name) + "'");
        if (schema_.columns()[*idx].kind != ColumnKind::Numeric)
            throw SchemaError("column '" + std::string(name) + "' is not numeric");
        std::vector<Rational> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(std::get<Rational>(r.cells[*idx]));
        return out;
    }

private:
    Schema schema_;
    std::vector<DataRow> rows_;
    std::unordered_map<std::int64_t, std::size_t> by_id_;
};

/// Loads a comma-separated file whose header names exactly the schema's
/// columns, in any order.  Row ids come from an `id` column when the schema
/// has one, otherwise from the 1-based row position.
inline DataTable load_csv(std::istream& in, const Schema& schema) {
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields)) throw HeaderMismatch("missing header row");
    if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);

    const auto& cols = schema.columns();
    std::vector<std::size_t> source(cols.size(), 0);  // schema column -> csv field
    std::set<std::string> seen;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        std::string name(detail::trim(fields[f]));
        auto idx = schema.index_of(name);
        if (!idx) throw HeaderMismatch("unexpected column '" + name + "'");
        if (!seen.insert(name).second) throw HeaderMismatch("column '" + name + "' repeated");
        source[*idx] = f;
    }
    for (const auto& c : cols)
        if (!seen.count(c.name)) throw HeaderMismatch("missing column '" + c.name + "'");

    const auto id_col = schema.index_of("id");
    std::vector<DataRow> rows;
    std::size_t line = 0;
    while (detail::read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;  // blank line
        if (fields.size() != cols.size())
            throw CellParseError(line, "*", std::to_string(fields.size()) + " fields");
        DataRow row;
        row.cells.reserve(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const std::string& raw = fields[source[i]];
            if (cols[i].kind == ColumnKind::Text) {
                row.cells.emplace_back(raw);
                continue;
            }
            try {
                row.cells.emplace_back(parse_rational(detail::trim(raw)));
            } catch (const NumberFormatError&) {
                throw CellParseError(line, cols[i].name, raw);
            }
        }
        if (id_col && cols[*id_col].kind == ColumnKind::Numeric) {
            const Rational& v = std::get<Rational>(row.cells[*id_col]);
            if (denominator(v) != 1 || abs(v) > Rational(INT64_MAX))
                throw CellParseError(line, "id", to_literal(v));
            row.id = numerator(v).convert_to<std::int64_t>();
        } else {
            row.id = static_cast<std::int64_t>(line);
        }
        rows.push_back(std::move(row));
    }
    return DataTable(schema, std::move(rows));
}

inline DataTable load_csv(std::string_view text, const Schema& schema) {
    std::istringstream in{std::string(text)};
    return load_csv(in, schema);
}

/// Exact (min, max) of a numeric column.
inline std::pair<Rational, Rational> column_extrema(const DataTable& table, std::string_view column) {
    auto values = table.numeric_column(column);
    if (values.empty()) throw EmptyColumn(std::string(column));
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
}

// ── Normalisation ───────────────────────────────────────────────────────────

struct ColumnNormalization {
    Rational min;  // m_u
    Rational max;  // M_u
    bool reversed = false;

    ColumnNormalization() = default;
    ColumnNormalization(Rational lo, Rational hi, bool rev = false)
        : min(std::move(lo)), max(std::move(hi)), reversed(rev) {
        if (!(min < max)) throw InvalidSpec("normalisation needs min < max");
    }
    friend bool operator==(const ColumnNormalization&, const ColumnNormalization&) = default;
};

/// Column name → bounds.
using NormalizationSpec = std::map<std::string, ColumnNormalization>;

/// (v - m_u)/(M_u - m_u), or one minus that when reversed; not clamped.
inline Rational normalize_unclamped(const Rational& v, const ColumnNormalization& spec) {
    Rational n = (v - spec.min) / (spec.max - spec.min);
    return spec.reversed ? Rational(1 - n) : n;
}

inline Degree normalize_value(const Rational& v, const ColumnNormalization& spec) {
    Rational n = normalize_unclamped(v, spec);
    if (n < 0) n = 0;
    if (n > 1) n = 1;
    return Degree(std::move(n));
}

/// Inverse of normalize_unclamped.
inline Rational denormalize(const Rational& n, const ColumnNormalization& spec) {
    Rational t = spec.reversed ? Rational(1 - n) : n;
    return spec.min + t * (spec.max - spec.min);
}

namespace detail {
inline Rational json_number(const nlohmann::json& j, const std::string& what) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const NumberFormatError&) {
        }
    }
    throw InvalidSpec(what + " must be a number");
}
}  // namespace detail

/// {column: {"min": number, "max": number, "reversed": bool}}.  Numbers may
/// also be strings ("12.8", "7/8") for exact input.
inline NormalizationSpec normalization_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InvalidSpec("normalisation document must be an object");
    NormalizationSpec spec;
    for (const auto& [column, entry] : doc.items()) {
        if (!entry.is_object() || !entry.contains("min") || !entry.contains("max"))
            throw InvalidSpec("column '" + column + "' needs min and max");
        bool reversed = false;
        if (entry.contains("reversed")) {
            if (!entry["reversed"].is_boolean()) throw InvalidSpec("column '" + column + "': reversed must be a bool");
            reversed = entry["reversed"].get<bool>();
        }
        Rational lo = detail::json_number(entry["min"], column + ".min");
        Rational hi = detail::json_number(entry["max"], column + ".max");
        if (!(lo < hi)) throw InvalidSpec("column '" + column + "': min must be below max");
        spec.emplace(column, ColumnNormalization(std::move(lo), std::move(hi), reversed));
    }
    return spec;
}

inline nlohmann::json rational_to_json(const Rational& r) {
    if (denominator(r) == 1 && abs(r) < Rational(INT64_MAX)) return numerator(r).convert_to<std::int64_t>();
    return to_double(r);
}

inline nlohmann::json normalization_to_json(const NormalizationSpec& spec) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [column, n] : spec)
        doc[column] = {{"min", rational_to_json(n.min)}, {"max", rational_to_json(n.max)}, {"reversed", n.reversed}};
    return doc;
}

/// Checks that `spec` names only numeric columns of `schema` and covers
/// every variable-bound one.
inline void validate_spec(const Schema& schema, const NormalizationSpec& spec) {
    for (const auto& [column, n] : spec) {
        auto idx = schema.index_of(column);
        if (!idx) throw InvalidSpec("unknown column '" + column + "'");
        if (schema.columns()[*idx].kind != ColumnKind::Numeric)
            throw InvalidSpec("column '" + column + "' is not numeric");
        if (!(n.min < n.max)) throw InvalidSpec("column '" + column + "': min must be below max");
    }
    for (const auto* c : schema.bound_columns())
        if (!spec.count(c->name)) throw MissingSpec(c->name);
}

struct NormalizedRow {
    std::int64_t id;
    Assignment world;
    std::string display;
};

class NormalizedTable {
public:
    NormalizedTable() = default;
    NormalizedTable(std::vector<std::string> variables, std::vector<NormalizedRow> rows)
        : variables_(std::move(variables)), rows_(std::move(rows)) {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (!by_id_.emplace(rows_[i].id, i).second) throw DuplicateId(rows_[i].id);
    }

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    bool binds(std::string_view variable) const {
        return std::find(variables_.begin(), variables_.end(), variable) != variables_.end();
    }
    const std::vector<NormalizedRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    const NormalizedRow& row(std::int64_t id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw UnknownRow(id);
        return rows_[it->second];
    }

    /// Degrees of one variable, in row order.
    std::vector<Rational> values_of(std::string_view variable) const {
        if (!binds(variable)) throw UnboundVariable(std::string(variable));
        std::vector<Rational> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r.world.at(variable).value());
        return out;
    }

private:
    std::vector<std::string> variables_;
    std::vector<NormalizedRow> rows_;
    std::unordered_map<std::int64_t, std::size_t> by_id_;
};

inline NormalizedTable normalize(const DataTable& table, const NormalizationSpec& spec) {
    const Schema& schema = table.schema();
    struct Bound {
        std::size_t index;
        std::string variable;
        const ColumnNormalization* spec;
    };
    std::vector<Bound> bound;
    std::vector<std::string> variables;
    for (std::size_t i = 0; i < schema.columns().size(); ++i) {
        const auto& c = schema.columns()[i];
        if (!c.variable) continue;
        auto it = spec.find(c.name);
        if (it == spec.end()) throw MissingSpec(c.name);
        bound.push_back({i, *c.variable, &it->second});
        variables.push_back(*c.variable);
    }
    std::vector<std::size_t> display;
    for (const auto& d : schema.display()) display.push_back(*schema.index_of(d));

    std::vector<NormalizedRow> rows;
    rows.reserve(table.size());
    for (const auto& r : table.rows()) {
        NormalizedRow out{r.id, {}, {}};
        for (const auto& b : bound) out.world.set(b.variable, normalize_value(std::get<Rational>(r.cells[b.index]), *b.spec));
        for (std::size_t d : display) {
            std::string text = std::holds_alternative<std::string>(r.cells[d]) ? std::get<std::string>(r.cells[d])
                                                                               : to_literal(std::get<Rational>(r.cells[d]));
            if (text.empty()) continue;
            if (!out.display.empty()) out.display += ' ';
            out.display += text;
        }
        rows.push_back(std::move(out));
    }
    return NormalizedTable(std::move(variables), std::move(rows));
}

/// The possible world of one row.
inline const Assignment& row_to_world(const NormalizedTable& table, std::int64_t id) { return table.row(id).world; }

}  // namespace lukq
