#pragma once

#include <functional>

namespace bfe {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  int expansions = 0;
};

// Bisection on a bracket with a sign change, down to width x_tol, followed by a
// single Newton polish with a numerical derivative (kept only if it stays inside
// the final bracket and reduces the residual).
RootResult solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double x_tol = 1e-12, int max_iter = 400);

// Expands [lo, hi] until f changes sign. `upward`/`downward` rules are applied
// to hi/lo respectively; throws NoSolution after max_expansions.
Bracket expand_bracket(const std::function<double(double)>& f, double lo, double hi,
                       const std::function<double(double)>& step_lo,
                       const std::function<double(double)>& step_hi, int max_expansions);

struct MinimumResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

MinimumResult golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double x_tol = 1e-12);

}  // namespace bfe
