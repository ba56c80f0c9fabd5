#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrc {

using Part = int;
// A composition is an ordered list of positive parts; the empty list is the
// empty composition.
using Composition = std::vector<Part>;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad parameters / malformed input. CLI exit code 1.
struct validation_error : error {
  using error::error;
};

// State-space or memory budget exceeded. CLI exit code 2.
struct budget_error : error {
  using error::error;
};

// An iterative numeric procedure failed to converge. CLI exit code 3.
struct convergence_error : error {
  using error::error;
};

struct Budget {
  // Bound on m * n^p before a DP table is attempted.
  std::uint64_t max_states = 10'000'000;
  // Bound on the total number of big-integer cells actually allocated.
  std::uint64_t max_table_cells = 60'000'000;
};

inline long sum_of(const Composition& c) {
  long s = 0;
  for (Part p : c) s += p;
  return s;
}

}  // namespace lrc
