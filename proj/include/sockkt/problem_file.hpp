#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sockkt/problem.hpp"
#include "sockkt/tolerances.hpp"
#include "sockkt/vec.hpp"

namespace sockkt {

/// A problem together with the candidate points it ships. `directions[k]`
/// lists the user directions for point k (possibly none).
struct ProblemFile {
  std::shared_ptr<const Problem> problem;
  std::vector<Vec> points;
  std::vector<std::vector<Vec>> directions;
  Tolerances tolerances;
};

/// Parses and validates a problem document. Throws InputError naming the
/// offending key (expression errors included).
ProblemFile parse_problem_file(const std::string& text);

ProblemFile load_problem_file(const std::filesystem::path& path);

}  // namespace sockkt
