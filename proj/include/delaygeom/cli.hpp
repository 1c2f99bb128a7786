#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaygeom/approx.hpp"
#include "delaygeom/mcsim.hpp"

namespace delaygeom
{

class UsageError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Thrown by parse_run_spec for --help; what() is the help text.
class HelpRequested : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_validation_failed = 2;
inline constexpr int exit_usage = 64;

struct SweepGrid
{
    std::string var;
    std::vector<double> values;
};

// "VAR=a:b:step", both endpoints included.
SweepGrid parse_sweep(const std::string& text);

struct RunSpec
{
    std::string command;
    std::string metric; // validate only
    NetworkParams params;
    CoverageCriterion criterion = Sir{};
    std::string method = "exact";
    std::optional<SweepGrid> sweep;
    int tau = 10;
    double t = 2.0;
    double x = 0.5;
    std::string out;
    std::string format = "csv";
    SimConfig sim;
    std::optional<double> tolerance;
    int riemann_n = riemann_default_n;
    bool general_integral = false;

    // Raw dB-valued inputs, kept for sweeps over them.
    double gamma_db = 0.0;
    double theta_db = 12.5;
    double power_dbm = 43.0;
    bool window_given = false;
};

// argv[0] is the program name. Throws UsageError naming the offending flag.
RunSpec parse_run_spec(int argc, const char* const* argv);

// Writes the result table to spec.out, or to `fallback` when no path is set.
int run(const RunSpec& spec, std::ostream& fallback);

// parse + run with exit-code mapping; messages go to `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace delaygeom
