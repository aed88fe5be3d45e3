#include "bfequiv/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "bfequiv/error.hpp"

namespace bfe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  return std::isnan(v) ? kNegInf : v;
}

// Candidate abscissae spanning many orders of magnitude inside (a, b).
std::vector<double> scan_points(double a, double b) {
  std::vector<double> pts;
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (!lower_inf && !upper_inf) {
    const int m = 64;
    for (int i = 1; i < m; ++i) pts.push_back(a + (b - a) * i / m);
    // geometric clustering towards each endpoint
    for (int k = 1; k <= 40; ++k) {
      const double f = std::ldexp(1.0, -k) / 64.0;
      pts.push_back(a + (b - a) * f);
      pts.push_back(b - (b - a) * f);
    }
  } else if (!lower_inf) {
    for (int k = -40; k <= 40; ++k) pts.push_back(a + std::ldexp(1.0, k));
    for (int i = 1; i < 64; ++i) pts.push_back(a + 0.125 * i);
  } else if (!upper_inf) {
    for (int k = -40; k <= 40; ++k) pts.push_back(b - std::ldexp(1.0, k));
    for (int i = 1; i < 64; ++i) pts.push_back(b - 0.125 * i);
  } else {
    pts.push_back(0.0);
    for (int k = -40; k <= 40; ++k) {
      pts.push_back(std::ldexp(1.0, k));
      pts.push_back(-std::ldexp(1.0, k));
    }
    for (int i = 1; i < 64; ++i) {
      pts.push_back(0.125 * i);
      pts.push_back(-0.125 * i);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> inside;
  for (double x : pts)
    if (x > a && x < b) inside.push_back(x);
  return inside;
}

}  // namespace

LogQuadResult log_integrate(const std::function<double(double)>& log_f, double a, double b,
                            const QuadOptions& opt) {
  LogQuadResult out;
  if (!(a < b)) {
    out.converged = true;
    return out;
  }
  const std::vector<double> pts = scan_points(a, b);
  std::size_t best = 0;
  double best_value = kNegInf;
  std::vector<double> values(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    values[i] = safe_eval(log_f, pts[i]);
    if (values[i] > best_value) {
      best_value = values[i];
      best = i;
    }
  }
  out.evaluations = static_cast<int>(pts.size());
  if (best_value == kNegInf) {
    out.converged = true;  // integrand vanishes on every probe
    return out;
  }
  // Golden-section refinement of the maximum between the neighbours of the best probe.
  double lo = best > 0 ? pts[best - 1] : (std::isinf(a) ? pts[best] - 1.0 : a);
  double hi = best + 1 < pts.size() ? pts[best + 1] : (std::isinf(b) ? pts[best] + 1.0 : b);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = safe_eval(log_f, x1), f2 = safe_eval(log_f, x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * (1.0 + std::fabs(lo)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = safe_eval(log_f, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = safe_eval(log_f, x1);
    }
    out.evaluations++;
  }
  double mode = f1 > f2 ? x1 : x2;
  double peak = std::max(f1, f2);
  if (best_value > peak) {
    mode = pts[best];
    peak = best_value;
  }
  // Width estimate from the curvature of log_f at the mode.
  double width = 0.0;
  {
    const double h = 1e-4 * std::max(1e-6, std::fabs(mode)) + 1e-7;
    const double fp = mode + h < b ? safe_eval(log_f, mode + h) : kNegInf;
    const double fm = mode - h > a ? safe_eval(log_f, mode - h) : kNegInf;
    out.evaluations += 2;
    const double second = (fp - 2.0 * peak + fm) / (h * h);
    if (std::isfinite(second) && second < 0.0) width = 1.0 / std::sqrt(-second);
    if (!(width > 0.0) || !std::isfinite(width)) {
      width = std::max(1e-3, 0.1 * std::fabs(mode));
    }
  }
  auto shifted = [&](double x) {
    const double v = log_f(x);
    if (!(v > kNegInf) || std::isnan(v)) return 0.0;
    return std::exp(v - peak);
  };
  // Pieces: [a, mode - k w], [mode - k w, mode], [mode, mode + k w], [mode + k w, b].
  const double k = 12.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  if (mode - k * width > a) cuts.push_back(mode - k * width);
  if (mode > a && mode < b) cuts.push_back(mode);
  if (mode + k * width < b) cuts.push_back(mode + k * width);
  cuts.push_back(b);
  QuadOptions piece_opt = opt;
  piece_opt.abs_tol = std::max(opt.abs_tol, 1e-300);
  double total = 0.0, error = 0.0;
  bool converged = true;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo_cut = cuts[i], hi_cut = cuts[i + 1];
    if (!(hi_cut > lo_cut)) continue;
    // The tolerance is relative to the central mass, not each tail piece.
    QuadOptions o = piece_opt;
    o.abs_tol = std::max(piece_opt.abs_tol, 0.1 * opt.rel_tol * width);
    QuadResult r;
    if (std::isinf(lo_cut) || std::isinf(hi_cut)) {
      r = integrate(shifted, lo_cut, hi_cut, o, width * 4.0);
    } else {
      r = integrate(shifted, lo_cut, hi_cut, o);
    }
    total += r.value;
    error += r.error;
    out.evaluations += r.evaluations;
    converged = converged && r.converged;
  }
  if (!(total > 0.0)) {
    out.log_value = kNegInf;
    out.converged = converged;
    return out;
  }
  out.log_value = peak + std::log(total);
  out.rel_error = error / total;
  out.converged = converged || out.rel_error <= opt.rel_tol * 10.0;
  return out;
}

}  // namespace bfe
