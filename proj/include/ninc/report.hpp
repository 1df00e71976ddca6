#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ninc/kernel.hpp"
#include "ninc/model.hpp"

namespace ninc {

enum class Quantity { Root, Sigma, DX0DP, DSigmaDP, DX0DTheta, DSigmaDTheta };

std::string_view to_string(Quantity q) noexcept;
/// Accepts the lowercase column names: root, sigma, dx0_dp, dsigma_dp,
/// dx0_dtheta, dsigma_dtheta. Throws DomainError otherwise.
Quantity parse_quantity(std::string_view name);

struct TableSpec {
    double e_field = 1.0;
    double sigma1 = 10.0;
    double sigma2 = 1.0;
    std::vector<double> theta_grid;
    std::vector<double> p_grid;
    Quantity quantity = Quantity::Root;
    int dim = 3;

    /// Grids nonempty and strictly increasing; table quantities are Root or Sigma.
    void validate() const;
};

/// Specs of the six reference tables: odd ids tabulate x0, even ids sigma*,
/// at E = 1 (ids 1, 2), 0.7 (3, 4) and 2 (5, 6).
TableSpec standard_table_spec(int table_id);

/// Dense row-major matrix; rows follow theta_grid, columns p_grid.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// One cell per (theta1, p). Solver errors are rethrown with the cell
/// coordinates appended to the message.
Matrix generate_table(const TableSpec& spec, const SolverConfig& cfg = {}, int workers = 1);

struct GoldenCell {
    std::string text;  // as printed
    double value = 0.0;
    double unit = 0.0;  // printed resolution: 0.01 for "-0.99", 1 for "-3.", 10 for "-1710"
};

struct GoldenTable {
    int id = 0;
    std::string caption;
    std::vector<double> theta_grid;
    std::vector<double> p_grid;
    std::vector<GoldenCell> cells;  // row-major

    [[nodiscard]] const GoldenCell& at(std::size_t r, std::size_t c) const {
        return cells[r * p_grid.size() + c];
    }
};

/// Printed resolution of a table entry. Digits after the decimal point set
/// it; integers without a point resolve to their trailing-zero place.
double printed_unit(std::string_view text);

/// Parses the golden CSV layout: '#' comment lines, a header "theta1/p,p1,...",
/// then one row per theta1.
GoldenTable parse_golden(std::string_view text, int table_id);

/// Verbatim CSV source of a shipped golden table; table_id in 1..6.
std::string_view golden_source(int table_id);
GoldenTable golden_table(int table_id);

enum class CellStatus { Mismatch, Guarded };

struct DiffRow {
    std::size_t row = 0;
    std::size_t col = 0;
    double theta1 = 0.0;
    double p = 0.0;
    double computed = 0.0;
    std::string golden_text;
    double golden = 0.0;
    double delta = 0.0;  // computed - golden
    CellStatus status = CellStatus::Mismatch;
};

struct GoldenDiff {
    std::vector<DiffRow> mismatches;
    /// Cells whose rounding differs from the printed value but which sit
    /// within half a printed unit (+ ulps) of a rounding boundary, so that
    /// either neighbouring rounding is accepted.
    std::vector<DiffRow> notes;

    [[nodiscard]] bool empty() const noexcept { return mismatches.empty(); }
};

enum class CellMatch { Exact, Guarded, Mismatch };

/// Compares one computed value with one printed entry.
CellMatch compare_cell(double computed, const GoldenCell& golden);

/// Throws ShapeError when the matrix is not the golden table's shape.
GoldenDiff golden_diff(const Matrix& computed, int table_id);

/// `computed` rounded to the printed resolution, formatted for a diff report.
std::string format_at_unit(double computed, double unit);

struct SweepSpec {
    enum class Axis { P, Theta1 };
    Axis axis = Axis::Theta1;
    double lo = 0.0;
    double hi = 1.0;
    int n_points = 101;
    Problem fixed;  // the swept field is overwritten
    std::vector<Quantity> quantities{Quantity::Sigma};

    void validate() const;
};

/// Columnar output; column names are also the CSV header.
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// One row per grid point: the swept value, then the requested quantities.
/// A theta1 sweep also carries the Hashin-Shtrikman reference as column "hs".
Dataset sweep(const SweepSpec& spec, const SolverConfig& cfg = {}, int workers = 1);

/// Wide table layout: "theta1", then one "p=<value>" column per p.
Dataset table_dataset(const TableSpec& spec, const Matrix& values);

/// 17 significant digits, locale independent.
std::string format_double(double v);

/// Header row plus data rows, ',' separated, LF terminated.
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace ninc
