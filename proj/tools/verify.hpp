#pragma once

#include <string>
#include <vector>

namespace foliate::cli {

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// operator, geometry, flow, singular, bundle, cli
const std::vector<std::string>& suite_names();

/// Runs one module battery, or every battery for "all". Throws SpecError for
/// an unknown suite name.
std::vector<InvariantResult> run_suite(const std::string& suite);

}  // namespace foliate::cli
