#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ninc/kernel.hpp"
#include "ninc/model.hpp"
#include "ninc/report.hpp"

namespace ninc::cli {

enum class Command { Solve, Field, Sens, Table, Sweep, Verify };
enum class Format { CSV, JSONLines };

/// Everything one invocation needs, after merging the config file (if any)
/// with the command-line flags. Flags win.
struct RunConfig {
    Command command = Command::Solve;
    Problem problem{10.0, 1.0, 2.0, 1.0, 0.5, 3};
    std::optional<std::string> output_path;
    Format format = Format::CSV;
    SolverConfig solver;

    // field
    double r_e = 1.0;
    int points = 100;
    std::optional<double> h;  // default 1e-3 r_e
    int quad_order = 32;
    // sens
    double fd_step = 1e-6;
    // table / verify
    int table_id = 1;
    // sweep
    SweepSpec::Axis axis = SweepSpec::Axis::Theta1;
    double from = 0.0;
    double to = 1.0;
    int n_points = 101;
    std::vector<Quantity> quantities{Quantity::Sigma};
};

/// Flat "key = value" text; '#' starts a comment. Keys are the long flag
/// names without the leading dashes ('_' and '-' are interchangeable).
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Worker count from NIL_NUM_THREADS; 1 when unset. Throws DomainError on
/// anything but a positive integer.
int worker_count(const char* env_value);

/// Entry point. `args` excludes the program name. Returns the exit code:
/// 0 success, 1 golden diff not empty, 2 argument or domain error,
/// 3 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ninc::cli
