#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpt::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kNumericFailure = 3,
    kVerificationFailure = 4,
};

/// Runs the command line `args` (without the program name). Tables go to
/// `out` unless --output is given; diagnostics and metadata go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "2,5,10", "1..20" (unit step) and "1..20:0.5", or a mix, into an
/// increasing list. Throws std::invalid_argument.
std::vector<double> parse_grid(const std::string& spec);

/// Same syntax as parse_grid, in the order given.
std::vector<double> parse_list(const std::string& spec);

/// 12 significant digits, the CSV number format.
std::string format_number(double v);

}  // namespace fpt::cli
