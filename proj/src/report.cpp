#include "ninc/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ninc/errors.hpp"
#include "ninc/parallel.hpp"
#include "ninc/sensitivity.hpp"

namespace ninc {

namespace detail {
extern const std::string_view kGoldenSources[6];
}

namespace {

const std::vector<double> kThetaGrid = {0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0};
const std::vector<double> kPGrid = {1.1, 1.3, 1.6, 2.0, 2.7, 4.0, 10.0};

void require_increasing(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError(std::string(name) + " must be strictly increasing");
}

double parse_number(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DomainError("not a number: '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return std::string(s);
}

std::string cell_label(double theta1, double p) {
    std::ostringstream os;
    os << " at cell (theta1=" << theta1 << ", p=" << p << ")";
    return os.str();
}

// Value of one quantity at one problem point. All branches of theta1 are
// legal for Root and Sigma; derivative quantities need a root.
double quantity_value(Quantity q, const Problem& prob, const SolverConfig& cfg) {
    switch (q) {
        case Quantity::Root: return effective_conductivity(prob, cfg).x0;
        case Quantity::Sigma: return effective_conductivity(prob, cfg).sigma_star;
        case Quantity::DX0DP:
            return prob.theta1 == 0.0 ? 0.0 : dx0_dp(prob, solve_root(prob, cfg));
        case Quantity::DSigmaDP:
            return prob.theta1 == 0.0 ? 0.0 : dsigma_dp(prob, solve_root(prob, cfg));
        case Quantity::DX0DTheta: return dx0_dtheta(prob, solve_root(prob, cfg));
        case Quantity::DSigmaDTheta: return dsigma_dtheta(prob, solve_root(prob, cfg));
    }
    return 0.0;
}

}  // namespace

std::string_view to_string(Quantity q) noexcept {
    switch (q) {
        case Quantity::Root: return "root";
        case Quantity::Sigma: return "sigma";
        case Quantity::DX0DP: return "dx0_dp";
        case Quantity::DSigmaDP: return "dsigma_dp";
        case Quantity::DX0DTheta: return "dx0_dtheta";
        case Quantity::DSigmaDTheta: return "dsigma_dtheta";
    }
    return "unknown";
}

Quantity parse_quantity(std::string_view name) {
    for (Quantity q : {Quantity::Root, Quantity::Sigma, Quantity::DX0DP, Quantity::DSigmaDP,
                       Quantity::DX0DTheta, Quantity::DSigmaDTheta})
        if (to_string(q) == name) return q;
    throw DomainError("unknown quantity '" + std::string(name) + "'");
}

void TableSpec::validate() const {
    require_increasing(theta_grid, "theta_grid");
    require_increasing(p_grid, "p_grid");
    if (quantity != Quantity::Root && quantity != Quantity::Sigma)
        throw DomainError("tables tabulate root or sigma only");
    for (double th : theta_grid) validate_problem(sigma1, sigma2, 2.0, e_field, th, dim);
    for (double p : p_grid) validate_problem(sigma1, sigma2, p, e_field, 0.5, dim);
}

TableSpec standard_table_spec(int table_id) {
    if (table_id < 1 || table_id > 6) throw DomainError("table id must be in 1..6");
    static constexpr double kFields[3] = {1.0, 0.7, 2.0};
    TableSpec spec;
    spec.e_field = kFields[(table_id - 1) / 2];
    spec.theta_grid = kThetaGrid;
    spec.p_grid = kPGrid;
    spec.quantity = table_id % 2 == 1 ? Quantity::Root : Quantity::Sigma;
    return spec;
}

Matrix generate_table(const TableSpec& spec, const SolverConfig& cfg, int workers) {
    spec.validate();
    Matrix m{spec.theta_grid.size(), spec.p_grid.size(), {}};
    m.values.assign(m.rows * m.cols, 0.0);
    parallel_for(m.values.size(), workers, [&](std::size_t k) {
        const double th = spec.theta_grid[k / m.cols];
        const double p = spec.p_grid[k % m.cols];
        const Problem prob = validate_problem(spec.sigma1, spec.sigma2, p, spec.e_field, th, spec.dim);
        try {
            m.values[k] = quantity_value(spec.quantity, prob, cfg);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(e.what() + cell_label(th, p), e.bracket_lo, e.bracket_hi);
        } catch (const DomainError& e) {
            throw DomainError(e.what() + cell_label(th, p));
        }
    });
    return m;
}

double printed_unit(std::string_view text) {
    std::string s = trim(text);
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.erase(0, 1);
    const std::size_t dot = s.find('.');
    if (dot != std::string::npos) return std::pow(10.0, -static_cast<double>(s.size() - dot - 1));
    int zeros = 0;
    for (auto it = s.rbegin(); it != s.rend() && *it == '0' && it + 1 != s.rend(); ++it) ++zeros;
    return std::pow(10.0, zeros);
}

GoldenTable parse_golden(std::string_view text, int table_id) {
    GoldenTable g;
    g.id = table_id;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (g.caption.empty()) g.caption = trim(std::string_view(line).substr(1));
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            for (std::size_t i = 1; i < fields.size(); ++i) g.p_grid.push_back(parse_number(fields[i]));
            header_seen = true;
            continue;
        }
        if (fields.size() != g.p_grid.size() + 1)
            throw ShapeError("golden row has " + std::to_string(fields.size() - 1) +
                             " entries, expected " + std::to_string(g.p_grid.size()));
        g.theta_grid.push_back(parse_number(fields[0]));
        for (std::size_t i = 1; i < fields.size(); ++i) {
            GoldenCell c;
            c.text = trim(fields[i]);
            c.value = parse_number(c.text);
            c.unit = printed_unit(c.text);
            g.cells.push_back(std::move(c));
        }
    }
    if (!header_seen || g.theta_grid.empty()) throw ShapeError("golden table is empty");
    return g;
}

std::string_view golden_source(int table_id) {
    if (table_id < 1 || table_id > 6) throw DomainError("table id must be in 1..6");
    return detail::kGoldenSources[table_id - 1];
}

GoldenTable golden_table(int table_id) { return parse_golden(golden_source(table_id), table_id); }

CellMatch compare_cell(double computed, const GoldenCell& golden) {
    const double u = golden.unit;
    const double q = computed / u;
    const long long k_gold = std::llround(golden.value / u);
    if (std::llround(q) == k_gold) return CellMatch::Exact;

    // Rounding-boundary guard: a value within half a unit (+ a few ulps) of
    // the boundary (k + 1/2) u may round either way.
    const double slack = 0.5 * u + 4.0 * (std::nextafter(std::abs(computed), INFINITY) - std::abs(computed));
    const long long base = static_cast<long long>(std::floor(q));
    for (long long k = base - 1; k <= base + 1; ++k) {
        const double boundary = (static_cast<double>(k) + 0.5) * u;
        if (std::abs(computed - boundary) <= slack && (k_gold == k || k_gold == k + 1))
            return CellMatch::Guarded;
    }
    return CellMatch::Mismatch;
}

GoldenDiff golden_diff(const Matrix& computed, int table_id) {
    const GoldenTable g = golden_table(table_id);
    if (computed.rows != g.theta_grid.size() || computed.cols != g.p_grid.size() ||
        computed.values.size() != computed.rows * computed.cols)
        throw ShapeError("computed table is " + std::to_string(computed.rows) + "x" +
                         std::to_string(computed.cols) + ", golden table " +
                         std::to_string(table_id) + " is " + std::to_string(g.theta_grid.size()) +
                         "x" + std::to_string(g.p_grid.size()));
    GoldenDiff diff;
    for (std::size_t r = 0; r < computed.rows; ++r) {
        for (std::size_t c = 0; c < computed.cols; ++c) {
            const GoldenCell& cell = g.at(r, c);
            const double v = computed.at(r, c);
            const CellMatch m = compare_cell(v, cell);
            if (m == CellMatch::Exact) continue;
            DiffRow row{r, c, g.theta_grid[r], g.p_grid[c], v, cell.text, cell.value,
                        v - cell.value, CellStatus::Mismatch};
            if (m == CellMatch::Guarded) {
                row.status = CellStatus::Guarded;
                diff.notes.push_back(std::move(row));
            } else {
                diff.mismatches.push_back(std::move(row));
            }
        }
    }
    return diff;
}

std::string format_at_unit(double computed, double unit) {
    const double rounded = static_cast<double>(std::llround(computed / unit)) * unit;
    std::ostringstream os;
    os.imbue(std::locale::classic());
    const int decimals = unit < 1.0 ? static_cast<int>(std::lround(-std::log10(unit))) : 0;
    os << std::fixed << std::setprecision(decimals) << rounded;
    return os.str();
}

void SweepSpec::validate() const {
    if (n_points < 1) throw DomainError("sweep needs at least one point");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("sweep range must be finite");
    if (n_points > 1 && !(hi > lo)) throw DomainError("sweep range must satisfy from < to");
    if (quantities.empty()) throw DomainError("sweep needs at least one quantity");
    validate_problem(fixed);
    bool theta_derivative = false;
    for (Quantity q : quantities)
        theta_derivative |= q == Quantity::DX0DTheta || q == Quantity::DSigmaDTheta;
    if (axis == Axis::P) {
        if (!(lo > 1.0)) throw DomainError("p sweep must stay above 1");
        if (theta_derivative && !(fixed.theta1 > 0.0 && fixed.theta1 < 1.0))
            throw DomainError("theta1 derivatives require 0 < theta1 < 1");
    } else {
        if (lo < 0.0 || hi > 1.0) throw DomainError("theta1 sweep must stay inside [0, 1]");
        if (theta_derivative && !(lo > 0.0 && hi < 1.0))
            throw DomainError("theta1 derivatives require a sweep inside (0, 1)");
    }
}

Dataset sweep(const SweepSpec& spec, const SolverConfig& cfg, int workers) {
    spec.validate();
    const bool theta_axis = spec.axis == SweepSpec::Axis::Theta1;
    Dataset out;
    out.columns.emplace_back(theta_axis ? "theta1" : "p");
    for (Quantity q : spec.quantities) out.columns.emplace_back(to_string(q));
    if (theta_axis) out.columns.emplace_back("hs");

    const auto n = static_cast<std::size_t>(spec.n_points);
    out.rows.assign(n, {});
    parallel_for(n, workers, [&](std::size_t i) {
        double v = spec.lo;
        if (n > 1) v = i + 1 == n ? spec.hi : spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) / (n - 1);
        Problem prob = spec.fixed;
        (theta_axis ? prob.theta1 : prob.p) = v;
        prob = validate_problem(prob);
        std::vector<double> row{v};
        for (Quantity q : spec.quantities) row.push_back(quantity_value(q, prob, cfg));
        if (theta_axis) row.push_back(hashin_shtrikman(prob));
        out.rows[i] = std::move(row);
    });
    return out;
}

Dataset table_dataset(const TableSpec& spec, const Matrix& values) {
    Dataset out;
    out.columns.emplace_back("theta1");
    for (double p : spec.p_grid) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, p);
        out.columns.push_back("p=" + std::string(buf, res.ptr));
    }
    for (std::size_t r = 0; r < values.rows; ++r) {
        std::vector<double> row{spec.theta_grid[r]};
        for (std::size_t c = 0; c < values.cols; ++c) row.push_back(values.at(r, c));
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.columns.size(); ++i)
        out << (i ? "," : "") << data.columns[i];
    out << '\n';
    for (const auto& row : data.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

}  // namespace ninc
