#pragma once

#include <string>
#include <vector>

#include "damt/violation.hpp"

namespace damt::cli {

// Property selection for `check --properties`: accepts the report tokens
// plus the umbrella "lemma1" (both lemma1 checks) and "all".
std::vector<Property> parse_property_csv(const std::string& csv);

// Entry point behind main(): args exclude the program name.
// Exit codes: 0 all clean, 1 violations or failed golden rows, 2 usage or
// configuration errors.
int run(const std::vector<std::string>& args);

}  // namespace damt::cli
