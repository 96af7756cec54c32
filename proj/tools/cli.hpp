#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace standout::cli {

/// Runs one subcommand. Exit codes: 0 success, 2 configuration or usage error, 3 numerical error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: STANDOUT_THREADS when set to a positive integer, else hardware concurrency.
int worker_count();

}  // namespace standout::cli
