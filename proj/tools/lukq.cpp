// lukq: command-line front end for loading, normalising, querying,
// transpiling and serving a dataset.
//
// Exit codes: 0 ok, 1 I/O or dataset error, 2 syntax error, 3 unbound
// variable, 4 invalid normalisation spec or interval.

#include "lukq/http_server.hpp"
#include "lukq/lukq.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitIo = 1;
constexpr int kExitSyntax = 2;
constexpr int kExitUnbound = 3;
constexpr int kExitInvalid = 4;

struct ExitError {
    int code;
};

[[noreturn]] void die(int code, const std::string& message) {
    std::cerr << "lukq: " << message << '\n';
    throw ExitError{code};
}

struct DataPaths {
    std::string data = LUKQ_DATA_DIR "/cars.csv";
    std::string schema = LUKQ_DATA_DIR "/cars.schema.json";
    std::string norm = LUKQ_DATA_DIR "/cars.norm.json";
};

void add_data_flags(CLI::App* cmd, DataPaths& paths, bool with_norm = true) {
    cmd->add_option("--data", paths.data, "CSV dataset")->envname("LUKQ_DATA");
    cmd->add_option("--schema", paths.schema, "schema JSON")->envname("LUKQ_SCHEMA");
    if (with_norm) cmd->add_option("--norm", paths.norm, "normalisation spec JSON")->envname("LUKQ_NORM");
}

std::ifstream open_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(kExitIo, "cannot open '" + path + "'");
    return in;
}

nlohmann::json read_json(const std::string& path) {
    auto in = open_file(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        die(kExitIo, path + ": " + e.what());
    }
}

lukq::Schema load_schema(const std::string& path) {
    try {
        return lukq::schema_from_json(read_json(path));
    } catch (const lukq::SchemaError& e) {
        die(kExitIo, path + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        die(kExitIo, path + ": " + e.what());
    }
}

lukq::DataTable load_table(const DataPaths& paths) {
    lukq::Schema schema = load_schema(paths.schema);
    auto in = open_file(paths.data);
    try {
        return lukq::load_csv(in, schema);
    } catch (const lukq::Error& e) {
        die(kExitIo, paths.data + ": " + e.what());
    }
}

lukq::NormalizationSpec load_spec(const std::string& path, const lukq::Schema& schema) {
    nlohmann::json doc = read_json(path);
    try {
        lukq::NormalizationSpec spec = lukq::normalization_from_json(doc);
        lukq::validate_spec(schema, spec);
        return spec;
    } catch (const lukq::Error& e) {
        die(kExitInvalid, path + ": " + e.what());
    }
}

lukq::Formula parse_or_die(const std::string& text) {
    try {
        return lukq::parse(text);
    } catch (const lukq::SyntaxError& e) {
        std::cerr << "lukq: syntax error: " << e.what() << '\n';
        std::cerr << "  " << text << '\n';
        std::size_t width = e.span().end > e.span().start ? e.span().end - e.span().start : 1;
        std::cerr << "  " << std::string(e.span().start, ' ') << std::string(width, '^') << '\n';
        throw ExitError{kExitSyntax};
    }
}

lukq::Rational rational_or_die(const std::string& text, const char* what) {
    try {
        return lukq::parse_rational(text);
    } catch (const lukq::NumberFormatError&) {
        die(kExitInvalid, std::string(what) + ": not a number '" + text + "'");
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// ── query ───────────────────────────────────────────────────────────────────

struct QueryArgs {
    DataPaths paths;
    std::string formula;
    std::size_t limit = 0;
    bool only_positive = false;
    std::string format = "table";
};

int run_query(const QueryArgs& args) {
    lukq::Formula f = parse_or_die(args.formula);
    lukq::DataTable table = load_table(args.paths);
    lukq::NormalizationSpec spec = load_spec(args.paths.norm, table.schema());
    lukq::NormalizedTable normalized = lukq::normalize(table, spec);
    lukq::QueryOptions options;
    if (args.limit > 0) options.limit = args.limit;
    options.only_positive = args.only_positive;
    lukq::RankedResult result;
    try {
        result = lukq::evaluate_query(f, normalized, options);
    } catch (const lukq::UnboundVariable& e) {
        die(kExitUnbound, e.what());
    }

    if (args.format == "json") {
        lukq::Response body{200, lukq::query_response_json(result, 1)};
        std::cout << body.text();
    } else if (args.format == "csv") {
        std::cout << "id,degree,degree_exact,display\n";
        for (const auto& e : result.entries)
            std::cout << e.id << ',' << e.degree.to_string() << ',' << e.degree.to_fraction() << ','
                      << csv_field(e.display) << '\n';
    } else {
        for (const auto& e : result.entries)
            std::cout << std::setw(6) << e.id << "  [" << e.degree.to_string() << "]  " << e.display << '\n';
    }
    return 0;
}

// ── transpile ───────────────────────────────────────────────────────────────

struct TranspileArgs {
    std::string schema = LUKQ_DATA_DIR "/cars.schema.json";
    std::string formula;
    std::string table = "auto";
    std::vector<std::string> projected;
    bool order = false;
};

int run_transpile(const TranspileArgs& args) {
    lukq::Formula f = parse_or_die(args.formula);
    lukq::Schema schema = load_schema(args.schema);
    try {
        lukq::ColumnBinding binding = lukq::binding_from_schema(schema, args.table);
        std::cout << lukq::transpile_select(f, binding, args.projected, args.order) << '\n';
    } catch (const lukq::UnboundVariable& e) {
        die(kExitUnbound, e.what());
    } catch (const std::invalid_argument& e) {
        die(kExitInvalid, e.what());
    }
    return 0;
}

// ── synth-literal ───────────────────────────────────────────────────────────

struct SynthArgs {
    DataPaths paths;
    std::string q1, q2, delta;
    std::string variable = "X";
    bool leq = false;
};

void print_verification(const lukq::BasicLiteral& literal, const std::optional<lukq::ThresholdSpec>& spec) {
    auto row = [&](const std::string& label, const lukq::Rational& x) {
        std::cout << std::left << std::setw(6) << label << std::right << std::setw(8) << lukq::to_fixed(x, 3)
                  << "  " << lukq::to_fixed(lukq::literal_value(literal, x), 3) << '\n';
    };
    std::cout << std::left << std::setw(6) << "" << std::right << std::setw(8) << "x" << "  g(x)\n";
    if (spec) {
        row("q1", spec->q1());
        row("q2", spec->q2());
    }
    for (int i = 0; i <= 20; ++i) row("", lukq::Rational(i, 20));
}

int run_synth(const SynthArgs& args) {
    if (!lukq::is_variable_name(args.variable)) die(kExitInvalid, "invalid variable name '" + args.variable + "'");
    lukq::BasicLiteral literal;
    std::optional<lukq::ThresholdSpec> spec;
    lukq::Formula base = args.leq ? lukq::neg(lukq::var(args.variable)) : lukq::var(args.variable);
    try {
        if (!args.delta.empty()) {
            lukq::Rational delta = rational_or_die(args.delta, "--delta");
            lukq::DataTable table = load_table(args.paths);
            lukq::NormalizedTable normalized = lukq::normalize(table, load_spec(args.paths.norm, table.schema()));
            std::vector<lukq::Rational> values;
            try {
                values = normalized.values_of(args.variable);
            } catch (const lukq::UnboundVariable& e) {
                die(kExitUnbound, e.what());
            }
            if (values.empty()) die(kExitIo, "dataset has no rows");
            literal = args.leq ? lukq::simulate_leq(delta, values) : lukq::simulate_geq(delta, values);
        } else {
            if (args.q1.empty() || args.q2.empty()) die(kExitInvalid, "give --q1 and --q2, or --delta and --var");
            spec.emplace(rational_or_die(args.q1, "--q1"), rational_or_die(args.q2, "--q2"));
            literal = lukq::synthesize_threshold_literal(*spec);
        }
    } catch (const lukq::InvalidInterval& e) {
        die(kExitInvalid, e.what());
    }

    std::cout << "literal: " << lukq::format(lukq::apply(literal, base)) << '\n';
    std::cout << "steps:";
    if (literal.is_identity()) std::cout << " (identity)";
    for (std::size_t i = 0; i < literal.steps().size(); ++i)
        std::cout << (i ? ", " : " ") << lukq::to_string(literal.steps()[i]);
    std::cout << '\n';
    print_verification(literal, spec);
    return 0;
}

// ── extrema / normalize ─────────────────────────────────────────────────────

int run_extrema(const DataPaths& paths) {
    lukq::DataTable table = load_table(paths);
    for (const auto& c : table.schema().columns()) {
        if (c.kind != lukq::ColumnKind::Numeric || c.name == "id") continue;
        std::cout << std::left << std::setw(26) << c.name << std::setw(5) << c.variable.value_or("--");
        if (table.size() == 0) {
            std::cout << "  (empty)\n";
            continue;
        }
        auto [lo, hi] = lukq::column_extrema(table, c.name);
        std::cout << std::right << std::setw(12) << lukq::to_literal(lo) << std::setw(12) << lukq::to_literal(hi)
                  << '\n';
    }
    return 0;
}

int run_normalize(const DataPaths& paths, bool check_only) {
    lukq::DataTable table = load_table(paths);
    lukq::NormalizationSpec spec = load_spec(paths.norm, table.schema());
    lukq::NormalizedTable normalized = lukq::normalize(table, spec);
    if (check_only) {
        std::cerr << "lukq: " << paths.norm << ": valid (" << spec.size() << " columns)\n";
        return 0;
    }
    std::cout << "id";
    for (const auto& v : normalized.variables()) std::cout << ',' << v;
    std::cout << '\n';
    for (const auto& r : normalized.rows()) {
        std::cout << r.id;
        for (const auto& v : normalized.variables()) std::cout << ',' << r.world.at(v).to_string();
        std::cout << '\n';
    }
    return 0;
}

// ── serve ───────────────────────────────────────────────────────────────────

int run_serve(const DataPaths& paths, const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0) die(kExitIo, "address must be host:port, got '" + addr + "'");
    std::string host = addr.substr(0, colon);
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
        die(kExitIo, "bad port in '" + addr + "'");
    }

    lukq::DataTable table = load_table(paths);
    lukq::NormalizationSpec spec = load_spec(paths.norm, table.schema());
    lukq::Service service(std::move(table), std::move(spec));
    httplib::Server server;
    lukq::mount(service, server);
    if (!server.bind_to_port(host, port)) die(kExitIo, "cannot listen on " + addr);
    std::cerr << "lukq: serving on " << addr << '\n';
    server.listen_after_bind();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Łukasiewicz-logic queries over tabular data"};
    app.require_subcommand(1);

    QueryArgs query;
    auto* query_cmd = app.add_subcommand("query", "rank rows by the degree of a formula");
    query_cmd->add_option("formula", query.formula, "query formula")->required();
    add_data_flags(query_cmd, query.paths);
    query_cmd->add_option("--limit", query.limit, "keep the first N entries")->check(CLI::PositiveNumber);
    query_cmd->add_flag("--only-positive", query.only_positive, "drop degree-0 rows");
    query_cmd->add_option("--format", query.format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    TranspileArgs transpile;
    auto* transpile_cmd = app.add_subcommand("transpile", "print the SQL statement for a formula");
    transpile_cmd->add_option("formula", transpile.formula, "query formula")->required();
    transpile_cmd->add_option("--schema", transpile.schema, "schema JSON")->envname("LUKQ_SCHEMA");
    transpile_cmd->add_option("--table", transpile.table, "SQL table name");
    transpile_cmd->add_option("--project", transpile.projected, "projected columns")->delimiter(',');
    transpile_cmd->add_flag("--order", transpile.order, "append ORDER BY Results DESC");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth-literal", "build a threshold-simulating basic literal");
    synth_cmd->add_option("--q1", synth.q1, "lower bound (degree 0 at and below)");
    synth_cmd->add_option("--q2", synth.q2, "upper bound (degree 1 at and above)");
    synth_cmd->add_option("--delta", synth.delta, "threshold for X >= delta on the dataset");
    synth_cmd->add_option("--var", synth.variable, "variable name");
    synth_cmd->add_flag("--leq", synth.leq, "simulate X <= delta instead (literal on !X)");
    add_data_flags(synth_cmd, synth.paths);

    DataPaths extrema_paths;
    auto* extrema_cmd = app.add_subcommand("extrema", "print min and max of each numeric column");
    add_data_flags(extrema_cmd, extrema_paths, false);

    DataPaths norm_paths;
    bool check_only = false;
    auto* norm_cmd = app.add_subcommand("normalize", "validate a spec and print normalised degrees");
    add_data_flags(norm_cmd, norm_paths);
    norm_cmd->add_flag("--check", check_only, "only validate the spec");

    DataPaths serve_paths;
    std::string addr = "127.0.0.1:8080";
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
    add_data_flags(serve_cmd, serve_paths);
    serve_cmd->add_option("--addr", addr, "host:port")->envname("LUKQ_ADDR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*query_cmd) return run_query(query);
        if (*transpile_cmd) return run_transpile(transpile);
        if (*synth_cmd) return run_synth(synth);
        if (*extrema_cmd) return run_extrema(extrema_paths);
        if (*norm_cmd) return run_normalize(norm_paths, check_only);
        if (*serve_cmd) return run_serve(serve_paths, addr);
    } catch (const ExitError& e) {
        return e.code;
    } catch (const lukq::InvalidSpec& e) {
        std::cerr << "lukq: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const lukq::MissingSpec& e) {
        std::cerr << "lukq: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "lukq: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
