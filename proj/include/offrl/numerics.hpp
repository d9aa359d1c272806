#pragma once

#include "offrl/types.hpp"

#include <array>
#include <cmath>

namespace offrl {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod nodes on [0, 1] (symmetric half) with the embedded
// 7-point Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
QuadratureResult gauss_kronrod_15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(j)];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(j)] * pair;
    // Gauss nodes are the odd-indexed Kronrod nodes.
    if (j % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(j / 2)] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half), 1};
}

template <typename F>
QuadratureResult adaptive(F& f, double a, double b, double tol, int depth) {
  QuadratureResult whole = gauss_kronrod_15(f, a, b);
  if (whole.error_estimate <= tol || depth <= 0) return whole;
  const double mid = 0.5 * (a + b);
  QuadratureResult left = adaptive(f, a, mid, 0.5 * tol, depth - 1);
  QuadratureResult right = adaptive(f, mid, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.error_estimate + right.error_estimate,
          left.intervals + right.intervals};
}

}  // namespace detail

/// Adaptive Gauss–Kronrod (7/15) quadrature of f on [a, b] to absolute
/// tolerance `tol` (bisection depth capped at 50).
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double tol = 1e-12) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b, "integration bounds must be finite and ordered");
  if (a == b) return {};
  return detail::adaptive(f, a, b, tol, 50);
}

/// Upper incomplete gamma Γ(s, x) = ∫ₓ^∞ t^{s−1} e^{−t} dt for x ≥ 1: quadrature
/// on [x, x + 40(1+s)] plus an analytic bound on the remaining tail.
double upper_incomplete_gamma(double s, double x, double tol = 1e-12);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided critical value: P(|T| ≤ q) = level.
double student_t_critical(double level, double dof);

}  // namespace offrl
