#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace warpcert::cli {

/// Runs one command line (arguments without the program name). The report
/// goes to `out` unless --output directs it to a file; diagnostics go to
/// `err`. Returns 0 on success, 1 on a failed verdict or a numerical
/// obstruction, 2 on input errors.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace warpcert::cli
