// JSON request handling for the query service.
//
// The service owns one raw DataTable, loaded at startup, and an immutable
// normalisation Snapshot.  PUT /normalization builds a new snapshot and
// swaps it in atomically; every other request pins the snapshot current at
// its start and reports that snapshot's version.
//
// This header is transport-free: Service::handle() maps (method, path, body)
// to (status, JSON).  http_server.hpp mounts it on cpp-httplib.
#pragma once

#include "lukq/dataset.hpp"
#include "lukq/formula.hpp"
#include "lukq/hedges.hpp"
#include "lukq/parser.hpp"
#include "lukq/query.hpp"
#include "lukq/sql.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace lukq {

using nlohmann::json;

enum class ApiErrorCode : std::uint8_t { SyntaxError, UnboundVariable, InvalidSpec, UnknownRow, Internal };

inline const char* to_string(ApiErrorCode c) {
    switch (c) {
        case ApiErrorCode::SyntaxError: return "syntax_error";
        case ApiErrorCode::UnboundVariable: return "unbound_variable";
        case ApiErrorCode::InvalidSpec: return "invalid_spec";
        case ApiErrorCode::UnknownRow: return "unknown_row";
        case ApiErrorCode::Internal: return "internal";
    }
    return "internal";
}

/// Machine-readable error body; `span` is set exactly for syntax errors.
struct ApiError {
    ApiErrorCode code;
    std::string message;
    std::optional<SourceSpan> span = std::nullopt;

    json to_json() const {
        json e{{"code", to_string(code)}, {"message", message}};
        if (span) e["span"] = {{"start", span->start}, {"end", span->end}};
        return {{"error", e}};
    }
};

struct Response {
    int status = 200;
    json body;

    /// Serialized body, as sent on the wire.
    std::string text() const { return body.dump() + "\n"; }
};

inline Response error_response(int status, ApiError e) { return {status, e.to_json()}; }

struct Snapshot {
    std::uint64_t version;
    NormalizationSpec spec;
    NormalizedTable table;
};

/// The /query body; the CLI's `--format json` prints the same document.
inline json query_response_json(const RankedResult& result, std::uint64_t version) {
    json entries = json::array();
    for (const auto& e : result.entries)
        entries.push_back({{"id", e.id},
                           {"display", e.display},
                           {"degree", e.degree.to_string()},
                           {"degree_exact", e.degree.to_fraction()}});
    return {{"entries", std::move(entries)}, {"version", version}};
}

inline ColumnBinding binding_from_schema(const Schema& schema, std::string table) {
    std::map<std::string, std::string> columns;
    for (const auto* c : schema.bound_columns()) columns.emplace(*c->variable, c->name);
    return ColumnBinding(std::move(table), std::move(columns));
}

inline json literal_steps_json(const BasicLiteral& literal) {
    json steps = json::array();
    for (const auto& s : literal.steps())
        steps.push_back({{"kind", s.kind == HedgeStep::Kind::Sum ? "sum" : "prod"}, {"k", s.k}});
    return steps;
}

class Service {
public:
    /// A service with no dataset answers every request with 503.
    Service() = default;

    Service(DataTable table, NormalizationSpec spec) : table_(std::make_shared<const DataTable>(std::move(table))) {
        validate_spec(table_->schema(), spec);
        NormalizedTable normalized = normalize(*table_, spec);
        store(std::make_shared<const Snapshot>(Snapshot{1, std::move(spec), std::move(normalized)}));
    }

    bool has_dataset() const noexcept { return table_ != nullptr; }

    std::shared_ptr<const Snapshot> snapshot() const { return std::atomic_load(&snapshot_); }

    Response handle(std::string_view method, std::string_view path, std::string_view body) {
        try {
            if (method == "GET" && path == "/schema") return get_schema();
            if (method == "PUT" && path == "/normalization") return put_normalization(body);
            if (method == "POST" && path == "/query") return post_query(body);
            if (method == "POST" && path == "/transpile") return post_transpile(body);
            if (method == "POST" && path == "/synth-literal") return post_synth_literal(body);
            return error_response(404, {ApiErrorCode::Internal, "no route " + std::string(method) + " " + std::string(path)});
        } catch (const std::exception& e) {
            return error_response(500, {ApiErrorCode::Internal, e.what()});
        }
    }

    Response get_schema() const {
        if (!table_) return no_dataset();
        auto snap = snapshot();
        json columns = json::array();
        for (const auto& c : table_->schema().columns()) {
            json j{{"name", c.name}, {"kind", c.kind == ColumnKind::Numeric ? "numeric" : "text"}};
            if (c.variable) j["variable"] = *c.variable;
            if (c.kind == ColumnKind::Numeric && table_->size() > 0) {
                auto [lo, hi] = column_extrema(*table_, c.name);
                j["min"] = rational_to_json(lo);
                j["max"] = rational_to_json(hi);
                j["min_exact"] = to_fraction(lo);
                j["max_exact"] = to_fraction(hi);
            }
            columns.push_back(std::move(j));
        }
        return {200,
                {{"columns", std::move(columns)},
                 {"display", table_->schema().display()},
                 {"rows", table_->size()},
                 {"normalization", normalization_to_json(snap->spec)},
                 {"version", snap->version}}};
    }

    /// Entries in the body replace the bounds of the columns they name; other
    /// columns keep their current bounds.
    Response put_normalization(std::string_view body) {
        if (!table_) return no_dataset();
        json doc;
        if (auto err = parse_body(body, doc)) return *err;
        std::lock_guard<std::mutex> writer(write_mutex_);
        auto current = snapshot();
        NormalizationSpec spec = current->spec;
        try {
            for (auto& [column, n] : normalization_from_json(doc)) spec.insert_or_assign(column, n);
            validate_spec(table_->schema(), spec);
        } catch (const Error& e) {
            return error_response(422, {ApiErrorCode::InvalidSpec, e.what()});
        }
        NormalizedTable normalized = normalize(*table_, spec);
        auto next = std::make_shared<const Snapshot>(Snapshot{current->version + 1, std::move(spec), std::move(normalized)});
        std::uint64_t version = next->version;
        store(std::move(next));
        return {200, {{"version", version}}};
    }

    Response post_query(std::string_view body) const {
        if (!table_) return no_dataset();
        json doc;
        if (auto err = parse_body(body, doc)) return *err;
        auto snap = snapshot();
        if (!doc.is_object() || !doc.contains("formula") || !doc["formula"].is_string())
            return error_response(422, {ApiErrorCode::InvalidSpec, "body needs a string \"formula\""});
        QueryOptions options;
        if (doc.contains("limit") && !doc["limit"].is_null()) {
            if (!doc["limit"].is_number_integer() || doc["limit"].get<std::int64_t>() < 1)
                return error_response(422, {ApiErrorCode::InvalidSpec, "limit must be a positive integer"});
            options.limit = doc["limit"].get<std::size_t>();
        }
        if (doc.contains("only_positive")) {
            if (!doc["only_positive"].is_boolean())
                return error_response(422, {ApiErrorCode::InvalidSpec, "only_positive must be a bool"});
            options.only_positive = doc["only_positive"].get<bool>();
        }
        Formula f = falsum();
        if (auto err = parse_formula(doc["formula"].get<std::string>(), f)) return *err;
        try {
            return {200, query_response_json(evaluate_query(f, snap->table, options), snap->version)};
        } catch (const UnboundVariable& e) {
            return error_response(422, {ApiErrorCode::UnboundVariable, e.what()});
        }
    }

    Response post_transpile(std::string_view body) const {
        if (!table_) return no_dataset();
        json doc;
        if (auto err = parse_body(body, doc)) return *err;
        if (!doc.is_object() || !doc.contains("formula") || !doc["formula"].is_string())
            return error_response(422, {ApiErrorCode::InvalidSpec, "body needs a string \"formula\""});
        Formula f = falsum();
        if (auto err = parse_formula(doc["formula"].get<std::string>(), f)) return *err;
        try {
            std::string table = doc.value("table", std::string("auto"));
            std::vector<std::string> projected;
            if (doc.contains("projected")) projected = doc["projected"].get<std::vector<std::string>>();
            bool order = doc.value("order", false);
            ColumnBinding binding = binding_from_schema(table_->schema(), table);
            return {200, {{"sql", transpile_select(f, binding, projected, order)}}};
        } catch (const UnboundVariable& e) {
            return error_response(422, {ApiErrorCode::UnboundVariable, e.what()});
        } catch (const json::exception& e) {
            return error_response(422, {ApiErrorCode::InvalidSpec, e.what()});
        } catch (const std::invalid_argument& e) {
            return error_response(422, {ApiErrorCode::InvalidSpec, e.what()});
        }
    }

    /// {q1, q2[, variable]} synthesizes directly; {delta, variable[, direction]}
    /// reads the variable's degrees from the current snapshot.
    Response post_synth_literal(std::string_view body) const {
        json doc;
        if (auto err = parse_body(body, doc)) return *err;
        if (!doc.is_object()) return error_response(422, {ApiErrorCode::InvalidSpec, "body must be an object"});
        try {
            std::string variable = doc.value("variable", std::string("X"));
            if (!is_variable_name(variable))
                return error_response(422, {ApiErrorCode::InvalidSpec, "invalid variable name '" + variable + "'"});
            if (doc.contains("q1") || doc.contains("q2")) {
                if (!doc.contains("q1") || !doc.contains("q2"))
                    return error_response(422, {ApiErrorCode::InvalidSpec, "need both q1 and q2"});
                ThresholdSpec spec(detail::json_number(doc["q1"], "q1"), detail::json_number(doc["q2"], "q2"));
                BasicLiteral literal = synthesize_threshold_literal(spec);
                return {200,
                        {{"literal", format(apply(literal, var(variable)))},
                         {"steps", literal_steps_json(literal)},
                         {"q1", to_fraction(spec.q1())},
                         {"q2", to_fraction(spec.q2())}}};
            }
            if (!doc.contains("delta"))
                return error_response(422, {ApiErrorCode::InvalidSpec, "need {q1, q2} or {delta, variable}"});
            if (!table_) return no_dataset();
            auto snap = snapshot();
            Rational delta = detail::json_number(doc["delta"], "delta");
            std::string direction = doc.value("direction", std::string("geq"));
            if (direction != "geq" && direction != "leq")
                return error_response(422, {ApiErrorCode::InvalidSpec, "direction must be geq or leq"});
            std::vector<Rational> values = snap->table.values_of(variable);
            if (values.empty()) return error_response(422, {ApiErrorCode::InvalidSpec, "dataset has no rows"});
            bool leq = direction == "leq";
            BasicLiteral literal = leq ? simulate_leq(delta, values) : simulate_geq(delta, values);
            Formula base = leq ? neg(var(variable)) : var(variable);
            return {200,
                    {{"literal", format(apply(literal, base))},
                     {"steps", literal_steps_json(literal)},
                     {"version", snap->version}}};
        } catch (const UnboundVariable& e) {
            return error_response(422, {ApiErrorCode::UnboundVariable, e.what()});
        } catch (const InvalidInterval& e) {
            return error_response(422, {ApiErrorCode::InvalidSpec, e.what()});
        } catch (const InvalidSpec& e) {
            return error_response(422, {ApiErrorCode::InvalidSpec, e.what()});
        }
    }

private:
    static Response no_dataset() { return error_response(503, {ApiErrorCode::Internal, "no dataset loaded"}); }

    static std::optional<Response> parse_body(std::string_view body, json& out) {
        try {
            out = json::parse(body);
            return std::nullopt;
        } catch (const json::parse_error& e) {
            std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
            return error_response(400, {ApiErrorCode::SyntaxError, "malformed JSON body", SourceSpan{at, at + 1}});
        }
    }

    static std::optional<Response> parse_formula(const std::string& text, Formula& out) {
        try {
            out = parse(text);
            return std::nullopt;
        } catch (const SyntaxError& e) {
            return error_response(400, {ApiErrorCode::SyntaxError, e.message(), e.span()});
        }
    }

    void store(std::shared_ptr<const Snapshot> next) { std::atomic_store(&snapshot_, std::move(next)); }

    std::shared_ptr<const DataTable> table_;
    std::shared_ptr<const Snapshot> snapshot_;  // accessed only through atomic_load / atomic_store
    std::mutex write_mutex_;
};

}  // namespace lukq
