#include "uqsd/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace uqsd {

namespace {

void check_spec(const ScanSpec& spec) {
  if (spec.dims < 1 || spec.dims > 2) {
    throw Error(ErrorCode::InvalidRange, "scan supports 1 or 2 dimensions");
  }
  for (int d = 0; d < spec.dims; ++d) {
    if (!(spec.ranges[d].first <= spec.ranges[d].second)) {
      throw Error(ErrorCode::InvalidRange, "empty scan range");
    }
    if (spec.coarse_points[d] < 8) {
      throw Error(ErrorCode::InvalidRange, "coarse grid needs at least 8 points");
    }
  }
}

double eval(const ScanSpec& spec, const std::array<double, 2>& p) {
  const double v = spec.objective(p);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteObjective, "objective is not finite");
  }
  return v;
}

template <typename F>
double golden_scalar(F&& f, double a, double b, double tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Golden search along one axis; the bracket starts one coarse cell wide and
// slides/expands whenever the minimum pins to an interior bracket edge.
double golden_axis_slide(const ScanSpec& spec, std::array<double, 2> p, int axis) {
  double half =
      (spec.ranges[axis].second - spec.ranges[axis].first) / (spec.coarse_points[axis] - 1);
  for (int grow = 0; grow < 64; ++grow) {
    const double lo = std::max(spec.ranges[axis].first, p[axis] - half);
    const double hi = std::min(spec.ranges[axis].second, p[axis] + half);
    p[axis] = golden_scalar(
        [&](double x) {
          std::array<double, 2> q = p;
          q[axis] = x;
          return eval(spec, q);
        },
        lo, hi, spec.refine_tol);
    const bool pinned_lo =
        p[axis] - lo < 2.0 * spec.refine_tol && lo > spec.ranges[axis].first;
    const bool pinned_hi =
        hi - p[axis] < 2.0 * spec.refine_tol && hi < spec.ranges[axis].second;
    if (!pinned_lo && !pinned_hi) break;
    half *= 2.0;
  }
  return p[axis];
}

struct Candidate {
  std::array<double, 2> params{};
  double value = std::numeric_limits<double>::infinity();
};

void consider(Candidate& best, const ScanSpec& spec, const std::array<double, 2>& p) {
  const double v = eval(spec, p);
  if (v < best.value) {
    best.value = v;
    best.params = p;
  }
}

}  // namespace

ScanResult scan(const ScanSpec& spec) {
  check_spec(spec);
  ScanResult best;
  best.value = std::numeric_limits<double>::infinity();
  const int nx = spec.coarse_points[0];
  const int ny = spec.dims == 2 ? spec.coarse_points[1] : 1;
  for (int i = 0; i < nx; ++i) {
    const double x = spec.ranges[0].first +
                     (spec.ranges[0].second - spec.ranges[0].first) * i / (nx - 1);
    for (int j = 0; j < ny; ++j) {
      std::array<double, 2> p{x, 0.0};
      if (spec.dims == 2) {
        p[1] = spec.ranges[1].first +
               (spec.ranges[1].second - spec.ranges[1].first) * j / (ny - 1);
      }
      const double v = eval(spec, p);
      if (v < best.value) {
        best.value = v;
        best.params = p;
      }
    }
  }
  return best;
}

ScanResult refine(const ScanSpec& spec, const std::array<double, 2>& start) {
  check_spec(spec);
  Candidate best;
  consider(best, spec, start);

  if (spec.dims == 1) {
    std::array<double, 2> p = start;
    p[0] = golden_axis_slide(spec, p, 0);
    consider(best, spec, p);
    return {best.params, best.value};
  }

  // Pass 1: contract a centered 17x17 mesh around the running best.
  {
    std::array<double, 2> span{};
    for (int d = 0; d < 2; ++d) {
      span[d] = 2.0 * (spec.ranges[d].second - spec.ranges[d].first) /
                (spec.coarse_points[d] - 1);
    }
    for (int zoom = 0; zoom < 80 && std::max(span[0], span[1]) > spec.refine_tol;
         ++zoom) {
      const std::array<double, 2> center = best.params;
      for (int i = -8; i <= 8; ++i) {
        for (int j = -8; j <= 8; ++j) {
          std::array<double, 2> q{center[0] + span[0] * i / 8.0,
                                  center[1] + span[1] * j / 8.0};
          q[0] = std::clamp(q[0], spec.ranges[0].first, spec.ranges[0].second);
          q[1] = std::clamp(q[1], spec.ranges[1].first, spec.ranges[1].second);
          consider(best, spec, q);
        }
      }
      span[0] *= 0.5;
      span[1] *= 0.5;
    }
  }

  // Pass 2: nested golden search, solving the inner axis exactly per outer
  // point. Handles valleys whose floor curves across both axes.
  for (int outer = 0; outer < 2; ++outer) {
    const int inner = 1 - outer;
    std::array<double, 2> track = best.params;
    auto reduced = [&](double x) {
      std::array<double, 2> q = track;
      q[outer] = x;
      const double xi = golden_scalar(
          [&](double y) {
            std::array<double, 2> r = q;
            r[inner] = y;
            return eval(spec, r);
          },
          spec.ranges[inner].first, spec.ranges[inner].second, spec.refine_tol);
      q[inner] = xi;
      consider(best, spec, q);
      return eval(spec, q);
    };
    golden_scalar(reduced, spec.ranges[outer].first, spec.ranges[outer].second,
                  spec.refine_tol);
  }

  // Pass 3: plain coordinate polish from the best point found.
  {
    std::array<double, 2> p = best.params;
    double prev = best.value;
    for (int s = 0; s < 12; ++s) {
      for (int d = 0; d < 2; ++d) p[d] = golden_axis_slide(spec, p, d);
      consider(best, spec, p);
      const double cur = eval(spec, p);
      if (prev - cur < 1e-13 * (1.0 + std::abs(cur))) break;
      prev = cur;
    }
  }

  return {best.params, best.value};
}

ScanResult minimize(const ScanSpec& spec) { return refine(spec, scan(spec).params); }

}  // namespace uqsd
