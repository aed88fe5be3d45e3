#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace bfe {

struct QuadOptions {
  double abs_tol = 1e-300;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Result of integrating exp(log_f); value is reported on the log scale.
struct LogQuadResult {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 21-point Kronrod rule with embedded 10-point Gauss rule.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208953953006, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double lower[10], upper[10];
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    lower[j] = f(center - dx);
    upper[j] = f(center + dx);
    const double sum = lower[j] + upper[j];
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  // QUADPACK qk21 error estimate
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::fabs(lower[j] - mean) + std::fabs(upper[j] - mean));
  kronrod *= half;
  gauss *= half;
  resasc *= std::fabs(half);
  double err = std::fabs(kronrod - gauss);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(kronrod));
  return {a, b, kronrod, err};
}

template <class F>
QuadResult adaptive_finite(F& f, double a, double b, const QuadOptions& opt) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  Panel first = gauss_kronrod(f, a, b);
  out.evaluations = 21;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int intervals = 1;
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) &&
         intervals < opt.max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Panel left = gauss_kronrod(f, worst.a, mid);
    Panel right = gauss_kronrod(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to limit accumulated rounding in the running totals.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) ||
                  total_err <= 1e-13 * std::fabs(total);
  return out;
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of f over (a, b). Infinite limits are mapped
// to finite intervals with x = c + s t / (1 - t); `scale` sets s.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}, double scale = 1.0) {
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (!lower_inf && !upper_inf) return detail::adaptive_finite(f, a, b, opt);
  if (lower_inf && upper_inf) {
    QuadResult left = integrate(f, a, 0.0, opt, scale);
    QuadResult right = integrate(f, 0.0, b, opt, scale);
    return {left.value + right.value, left.error + right.error,
            left.evaluations + right.evaluations, left.converged && right.converged};
  }
  const double origin = lower_inf ? b : a;
  const double sign = lower_inf ? -1.0 : 1.0;
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = origin + sign * scale * t / one_minus;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v * scale / (one_minus * one_minus);
  };
  return detail::adaptive_finite(mapped, 0.0, 1.0, opt);
}

// Integral of exp(log_f) over (a, b), returned as a logarithm. The integrand
// is shifted by its located maximum before exponentiation, and the domain is
// split around the mode so that sharp peaks far from the origin are resolved.
LogQuadResult log_integrate(const std::function<double(double)>& log_f, double a, double b,
                            const QuadOptions& opt = {});

}  // namespace bfe
