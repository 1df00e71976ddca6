#include "ninc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include "ninc/errors.hpp"
#include "ninc/field.hpp"
#include "ninc/sensitivity.hpp"

namespace ninc::cli {

namespace {

using Value = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
};

const std::vector<std::string> kProblemKeys = {"sigma1", "sigma2", "p", "e", "theta1", "dim"};
const std::vector<std::string> kSolverKeys = {"abs-tol", "x-tol", "max-iter"};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "sigma1", "sigma2", "p",  "e",    "theta1",     "dim",     "abs-tol", "x-tol",
        "max-iter", "output", "format", "re", "points", "h", "quad-order", "fd-step",
        "id",       "axis",   "from",   "to", "n",      "quantities"};
    return keys;
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string strip(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw DomainError("--" + key + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
    long long v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw DomainError("--" + key + ": expected an integer, got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& key) {
    const long long v = parse_integer(text, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw DomainError("--" + key + ": out of range");
    return static_cast<int>(v);
}

class Settings {
public:
    explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    [[nodiscard]] const std::string* find(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }
    [[nodiscard]] double real(const std::string& key, double fallback) const {
        const auto* v = find(key);
        return v ? parse_real(*v, key) : fallback;
    }
    [[nodiscard]] int integer(const std::string& key, int fallback) const {
        const auto* v = find(key);
        return v ? parse_int(*v, key) : fallback;
    }

private:
    std::map<std::string, std::string> values_;
};

RunConfig resolve(Command command, const Settings& s) {
    RunConfig rc;
    rc.command = command;
    Problem& pr = rc.problem;
    pr.sigma1 = s.real("sigma1", pr.sigma1);
    pr.sigma2 = s.real("sigma2", pr.sigma2);
    pr.p = s.real("p", pr.p);
    pr.e_field = s.real("e", pr.e_field);
    pr.theta1 = s.real("theta1", pr.theta1);
    pr.dim = s.integer("dim", pr.dim);

    if (s.find("abs-tol")) rc.solver.abs_tol = s.real("abs-tol", 0.0);
    if (s.find("x-tol")) rc.solver.x_tol = s.real("x-tol", 0.0);
    rc.solver.max_iter = s.integer("max-iter", rc.solver.max_iter);
    rc.solver.validate();

    if (const auto* v = s.find("output")) rc.output_path = *v;
    if (const auto* v = s.find("format")) {
        if (*v == "csv") rc.format = Format::CSV;
        else if (*v == "jsonl") rc.format = Format::JSONLines;
        else throw DomainError("--format must be csv or jsonl");
    }

    rc.r_e = s.real("re", rc.r_e);
    rc.points = s.integer("points", rc.points);
    if (s.find("h")) rc.h = s.real("h", 0.0);
    rc.quad_order = s.integer("quad-order", rc.quad_order);
    rc.fd_step = s.real("fd-step", rc.fd_step);
    rc.table_id = s.integer("id", rc.table_id);
    if (const auto* v = s.find("axis")) {
        if (*v == "p") rc.axis = SweepSpec::Axis::P;
        else if (*v == "theta1") rc.axis = SweepSpec::Axis::Theta1;
        else throw DomainError("--axis must be p or theta1");
    }
    rc.from = s.real("from", rc.from);
    rc.to = s.real("to", rc.to);
    rc.n_points = s.integer("n", rc.n_points);
    if (const auto* v = s.find("quantities")) {
        rc.quantities.clear();
        std::stringstream list(*v);
        std::string item;
        while (std::getline(list, item, ',')) rc.quantities.push_back(parse_quantity(strip(item)));
    }

    if (command == Command::Solve || command == Command::Field || command == Command::Sens)
        rc.problem = validate_problem(rc.problem);
    if (command == Command::Field) {
        if (!(rc.r_e > 0.0) || !std::isfinite(rc.r_e)) throw DomainError("--re must be positive");
        if (rc.points < 1) throw DomainError("--points must be at least 1");
        if (rc.quad_order < 4) throw DomainError("--quad-order must be at least 4");
        if (rc.h && !(*rc.h > 0.0)) throw DomainError("--h must be positive");
    }
    if (command == Command::Sens && !(rc.fd_step > 0.0))
        throw DomainError("--fd-step must be positive");
    return rc;
}

std::string csv_field(const Value& v) {
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
    if (std::holds_alternative<std::string>(v)) {
        const std::string& s = std::get<std::string>(v);
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + '"';
    }
    return {};
}

void emit(std::ostream& out, const Table& t, Format format) {
    if (format == Format::CSV) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
            out << '\n';
        }
        return;
    }
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Value& v = row[i];
            auto& slot = obj[t.columns[i]];
            if (std::holds_alternative<double>(v)) slot = std::get<double>(v);
            else if (std::holds_alternative<long long>(v)) slot = std::get<long long>(v);
            else if (std::holds_alternative<std::string>(v)) slot = std::get<std::string>(v);
        }
        out << obj.dump() << '\n';
    }
}

Table from_dataset(const Dataset& d) {
    Table t{d.columns, {}};
    for (const auto& row : d.rows) t.rows.emplace_back(row.begin(), row.end());
    return t;
}

Table run_solve(const RunConfig& rc) {
    const Problem& pr = rc.problem;
    const EffectiveResult res = effective_conductivity(pr, rc.solver);
    const double residual = pr.theta1 > 0.0 ? solve_root(pr, rc.solver).residual : 0.0;
    Value hs;
    if (res.hs_value) hs = *res.hs_value;
    return {{"x0", "sigma_star", "residual", "branch", "hs_value"},
            {{res.x0, res.sigma_star, residual, std::string(to_string(res.branch)), hs}}};
}

Table run_field(const RunConfig& rc) {
    const FieldSolution sol = build_field(rc.problem, rc.r_e, rc.solver);
    const auto res = residuals(sol);
    const double h = rc.h.value_or(1e-3 * rc.r_e);
    const double harm = harmonicity_check(sol, rc.points, h);
    const EnergyReport en = energy_identity(sol, rc.quad_order);
    const Coefficients& c = sol.coeffs;
    return {{"a1", "a2", "b2", "r_c", "r_e", "sigma_star", "residual_potential", "residual_flux",
             "residual_boundary", "residual_exterior", "harmonicity", "core_dissipation",
             "coating_dissipation", "homogeneous_dissipation", "rel_error"},
            {{c.a1, c.a2, c.b2, c.r_c, c.r_e, sol.sigma_star, res[0], res[1], res[2], res[3], harm,
              en.core_dissipation, en.coating_dissipation, en.homogeneous_dissipation,
              en.rel_error}}};
}

Table run_sens(const RunConfig& rc) {
    const SensitivityReport r = full_report(rc.problem, rc.solver, rc.fd_step);
    Value threshold_verdict, numeric_verdict, consistent;
    if (rc.problem.e_field > 1.0) {
        const RegimeVerdict v = regime_classify(rc.problem, rc.solver);
        threshold_verdict = std::string(to_string(v.threshold_verdict));
        numeric_verdict = std::string(to_string(v.numeric_verdict));
        consistent = std::string(v.consistent ? "true" : "false");
    }
    return {{"dx0_dp", "dsigma_dp", "dx0_dtheta", "dsigma_dtheta", "fd_dx0_dp", "fd_dsigma_dp",
             "fd_dx0_dtheta", "fd_dsigma_dtheta", "max_rel_mismatch", "regime_threshold",
             "regime_numeric", "regime_consistent"},
            {{r.dx0_dp, r.dsigma_dp, r.dx0_dtheta, r.dsigma_dtheta, r.fd_dx0_dp, r.fd_dsigma_dp,
              r.fd_dx0_dtheta, r.fd_dsigma_dtheta, r.max_rel_mismatch, threshold_verdict,
              numeric_verdict, consistent}}};
}

Table run_verify(const RunConfig& rc, int workers, std::ostream& err, bool& clean) {
    const TableSpec spec = standard_table_spec(rc.table_id);
    const GoldenDiff diff = golden_diff(generate_table(spec, rc.solver, workers), rc.table_id);
    const GoldenTable gold = golden_table(rc.table_id);
    Table t{{"status", "theta1", "p", "computed", "rounded", "golden", "delta"}, {}};
    auto add = [&](const DiffRow& d, const char* status) {
        const double unit = gold.at(d.row, d.col).unit;
        t.rows.push_back({std::string(status), d.theta1, d.p, d.computed,
                          format_at_unit(d.computed, unit), d.golden_text, d.delta});
    };
    for (const auto& d : diff.mismatches) add(d, "mismatch");
    for (const auto& d : diff.notes) add(d, "guarded");
    clean = diff.empty();
    err << "table " << rc.table_id << ": " << diff.mismatches.size() << " mismatched, "
        << diff.notes.size() << " guarded\n";
    return t;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string body = strip(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = normalize_key(strip(std::string_view(body).substr(0, eq)));
        const std::string value = strip(std::string_view(body).substr(eq + 1));
        if (!known_keys().count(key))
            throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

int worker_count(const char* env_value) {
    if (env_value == nullptr || *env_value == '\0') return 1;
    const long long v = parse_integer(env_value, "NIL_NUM_THREADS");
    if (v < 1 || v > 4096) throw DomainError("NIL_NUM_THREADS must be a positive integer");
    return static_cast<int>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact parameters of nonlinear neutral coated inclusions.", "ninc"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1, 1);

    struct Registered {
        CLI::App* sub;
        std::string key;
        CLI::Option* opt;
    };
    std::vector<Registered> registered;
    std::map<std::string, std::string> storage;
    auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
        registered.push_back({sub, key, sub->add_option("--" + key, storage[key], help)});
    };
    auto add_common = [&](CLI::App* sub, bool with_problem) {
        add(sub, "config", "key = value file; flags override it");
        add(sub, "output", "write to this path instead of standard output");
        add(sub, "format", "csv (default) or jsonl");
        if (with_problem) {
            add(sub, "sigma1", "core coefficient (default 10)");
            add(sub, "sigma2", "coating conductivity (default 1)");
            add(sub, "p", "p-Laplacian exponent, > 1 (default 2)");
            add(sub, "e", "applied field magnitude, > 0 (default 1)");
            add(sub, "theta1", "core volume/area fraction in [0, 1] (default 0.5)");
            add(sub, "dim", "2 or 3 (default 3)");
        }
        add(sub, "abs-tol", "residual tolerance on |f(x0)|");
        add(sub, "x-tol", "bracket width tolerance");
        add(sub, "max-iter", "solver iteration cap (default 200)");
    };

    std::map<CLI::App*, Command> commands;
    auto* solve = app.add_subcommand("solve", "root x0 and effective conductivity");
    add_common(solve, true);
    commands[solve] = Command::Solve;

    auto* field = app.add_subcommand("field", "field coefficients, interface residuals, energy check");
    add_common(field, true);
    add(field, "re", "exterior radius (default 1)");
    add(field, "points", "coating points for the harmonicity check (default 100)");
    add(field, "h", "stencil spacing (default 1e-3 * re)");
    add(field, "quad-order", "Gauss-Legendre order per axis (default 32)");
    commands[field] = Command::Field;

    auto* sens = app.add_subcommand("sens", "analytic sensitivities against finite differences");
    add_common(sens, true);
    add(sens, "fd-step", "relative finite-difference step (default 1e-6)");
    commands[sens] = Command::Sens;

    auto* table = app.add_subcommand("table", "regenerate reference table 1..6");
    add_common(table, false);
    add(table, "id", "table id, 1..6");
    commands[table] = Command::Table;

    auto* verify = app.add_subcommand("verify", "diff a regenerated table against its golden copy");
    add_common(verify, false);
    add(verify, "id", "table id, 1..6");
    commands[verify] = Command::Verify;

    auto* sweep_cmd = app.add_subcommand("sweep", "quantities along a p or theta1 grid");
    add_common(sweep_cmd, true);
    add(sweep_cmd, "axis", "p or theta1 (default theta1)");
    add(sweep_cmd, "from", "first grid value (default 0)");
    add(sweep_cmd, "to", "last grid value (default 1)");
    add(sweep_cmd, "n", "number of grid points (default 101)");
    add(sweep_cmd, "quantities",
        "comma list of root, sigma, dx0_dp, dsigma_dp, dx0_dtheta, dsigma_dtheta (default sigma)");
    commands[sweep_cmd] = Command::Sweep;

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp& e) {
            if (app.get_subcommands().empty()) {
                out << app.help("", CLI::AppFormatMode::All);
                return 0;
            }
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        }

        CLI::App* chosen = app.get_subcommands().front();
        std::map<std::string, std::string> merged;
        std::map<std::string, std::string> flags;
        for (const auto& r : registered)
            if (r.sub == chosen && r.opt->count() > 0) flags[r.key] = storage[r.key];
        if (const auto it = flags.find("config"); it != flags.end()) {
            std::ifstream in(it->second, std::ios::binary);
            if (!in) throw DomainError("cannot read config file '" + it->second + "'");
            std::ostringstream text;
            text << in.rdbuf();
            merged = parse_config_text(text.str());
            flags.erase(it);
        }
        for (auto& [k, v] : flags) merged[k] = v;

        const RunConfig rc = resolve(commands.at(chosen), Settings(std::move(merged)));
        const int workers = worker_count(std::getenv("NIL_NUM_THREADS"));

        Table result;
        bool clean = true;
        switch (rc.command) {
            case Command::Solve: result = run_solve(rc); break;
            case Command::Field: result = run_field(rc); break;
            case Command::Sens: result = run_sens(rc); break;
            case Command::Table: {
                const TableSpec spec = standard_table_spec(rc.table_id);
                result = from_dataset(table_dataset(spec, generate_table(spec, rc.solver, workers)));
                break;
            }
            case Command::Verify: result = run_verify(rc, workers, err, clean); break;
            case Command::Sweep: {
                SweepSpec spec;
                spec.axis = rc.axis;
                spec.lo = rc.from;
                spec.hi = rc.to;
                spec.n_points = rc.n_points;
                spec.fixed = rc.problem;
                spec.quantities = rc.quantities;
                result = from_dataset(sweep(spec, rc.solver, workers));
                break;
            }
        }

        if (rc.output_path) {
            std::ofstream file(*rc.output_path, std::ios::binary);
            if (!file) throw DomainError("cannot open output file '" + *rc.output_path + "'");
            emit(file, result, rc.format);
            if (!file) throw DomainError("failed writing '" + *rc.output_path + "'");
        } else {
            emit(out, result, rc.format);
        }
        return clean ? 0 : 1;
    } catch (const CLI::ParseError& e) {
        err << "ninc: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        err << "ninc: " << e.what() << '\n';
        return 3;
    } catch (const InternalInconsistency& e) {
        err << "ninc: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "ninc: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ninc::cli
