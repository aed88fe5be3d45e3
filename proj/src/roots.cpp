#include "bfequiv/roots.hpp"

#include <cmath>
#include <sstream>

#include "bfequiv/error.hpp"

namespace bfe {

RootResult solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double x_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  RootResult out;
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os.precision(12);
    os << "no sign change on bracket [" << lo << ", " << hi << "]: f=" << flo << ", " << fhi;
    fail(ErrorCode::NoSolution, os.str());
  }
  int iter = 0;
  while (hi - lo > x_tol * std::max(1.0, std::fabs(lo) + std::fabs(hi)) * 0.5 &&
         iter < max_iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    ++iter;
    if (fm == 0.0) return {mid, 0.0, iter, true};
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double x = std::fabs(flo) < std::fabs(fhi) ? lo : hi;
  double fx = std::fabs(flo) < std::fabs(fhi) ? flo : fhi;
  // Newton polish with a central difference quotient.
  const double h = std::max(hi - lo, 1e-9 * std::max(1.0, std::fabs(x)));
  const double slope = (f(x + h) - f(x - h)) / (2.0 * h);
  if (std::isfinite(slope) && slope != 0.0) {
    const double candidate = x - fx / slope;
    if (candidate >= lo - h && candidate <= hi + h) {
      const double fc = f(candidate);
      if (std::fabs(fc) < std::fabs(fx)) {
        x = candidate;
        fx = fc;
      }
    }
  }
  out.x = x;
  out.residual = fx;
  out.iterations = iter;
  out.converged = iter < max_iter;
  return out;
}

Bracket expand_bracket(const std::function<double(double)>& f, double lo, double hi,
                       const std::function<double(double)>& step_lo,
                       const std::function<double(double)>& step_hi, int max_expansions) {
  Bracket b{lo, hi, 0};
  double flo = f(b.lo);
  double fhi = f(b.hi);
  while ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
    if (b.expansions >= max_expansions) {
      std::ostringstream os;
      os.precision(12);
      os << "no sign change after " << max_expansions << " expansions; last bracket [" << b.lo
         << ", " << b.hi << "]";
      fail(ErrorCode::NoSolution, os.str());
    }
    if (step_lo) {
      b.lo = step_lo(b.lo);
      flo = f(b.lo);
    }
    if (step_hi) {
      b.hi = step_hi(b.hi);
      fhi = f(b.hi);
    }
    ++b.expansions;
  }
  return b;
}

MinimumResult golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double x_tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  int iter = 0;
  while (hi - lo > x_tol * std::max(1.0, std::fabs(x1)) && iter < 500) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
    ++iter;
  }
  return f1 < f2 ? MinimumResult{x1, f1, iter} : MinimumResult{x2, f2, iter};
}

}  // namespace bfe
