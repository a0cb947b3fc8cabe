#pragma once

// Front end behind the `gham` executable:
//
//   gham analyze <file.gham> [--json out.json] [--seed n] [--samples n] [--checks identities,euler_lagrange]
//   gham bracket <file.gham> <F> <G> [--bracket gp|gd|gd1|gd2]
//   gham lattice <config.gham> [--checks ...] [--json out.json] [--seed n] [--kernels out.json] [tolerances]
//
// In bracket expressions phi<k> names the k-th classified constraint and chi<k> the
// k-th second-class one (1-based).

#include <ostream>
#include <string>
#include <vector>

namespace gham::cli {

enum ExitCode : int {
  kPass = 0,
  kCheckFailure = 1,
  kInputError = 2,
  kInconsistent = 3,
  kUnsupported = 4,
};

inline constexpr const char* kSchema = "gham-report/1";

const std::vector<std::string>& lattice_check_names();

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gham::cli
