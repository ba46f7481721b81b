#ifndef FACT_CLI_HPP
#define FACT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fact/core.hpp"

namespace fact::cli {

// Exit codes: 0 success (verify: match), 1 runtime failure (verify:
// mismatch), 2 usage or input validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// CSV p-value input: one value per line (ids auto-assigned 1..n) or
// "id,p" pairs; optional header line; surrounding whitespace tolerated.
PValueVector parse_pvalue_csv(std::istream& in);

}  // namespace fact::cli

#endif
