#pragma once

#include <array>
#include <functional>
#include <vector>

#include "uqsd/types.hpp"

namespace uqsd {

/// Dense grid scan plus golden-section refinement over 1 or 2 parameters.
struct ScanSpec {
  int dims = 1;
  std::array<std::pair<double, double>, 2> ranges{};  // closed intervals per axis
  std::array<int, 2> coarse_points{512, 512};
  double refine_tol = 1e-7;
  std::function<double(const std::array<double, 2>&)> objective;
};

struct ScanResult {
  std::array<double, 2> params{};
  double value = 0.0;
};

/// Evaluates the full grid; ties break toward the first row-major index.
ScanResult scan(const ScanSpec& spec);

/// Golden-section search per axis (coordinate descent in 2-D) until each
/// parameter interval is below refine_tol.
ScanResult refine(const ScanSpec& spec, const std::array<double, 2>& start);

/// Convenience: scan then refine around the grid minimum.
ScanResult minimize(const ScanSpec& spec);

}  // namespace uqsd
