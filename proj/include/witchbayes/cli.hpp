#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace witchbayes {

/// Exit codes: 0 ok, 1 internal failure, 2 bad flags or values (a JSON
/// error object is written to `err`), 3 impossible evidence.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace witchbayes
