#include "offrl/numerics.hpp"

namespace offrl {

double upper_incomplete_gamma(double s, double x, double tol) {
  require(s > 0.0 && std::isfinite(s), "incomplete gamma needs a finite s > 0");
  require(x >= 1.0, "this evaluator covers x ≥ 1");
  const double upper = x + 40.0 * (1.0 + s);
  auto integrand = [s](double t) { return std::exp((s - 1.0) * std::log(t) - t); };
  const QuadratureResult body = integrate(integrand, x, upper, tol);
  // ∫_L^∞ t^{s−1}e^{−t} dt ≤ L^{s−1}e^{−L}·L/(L−(s−1)) for L > s − 1.
  const double head = std::exp((s - 1.0) * std::log(upper) - upper);
  const double tail = s > 1.0 ? head * upper / (upper - (s - 1.0)) : head;
  return body.value + tail;
}

double student_t_cdf(double t, double dof) {
  require(dof > 0.0, "degrees of freedom must be positive");
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * M_PI);
  auto pdf = [&](double x) {
    return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(x * x / dof));
  };
  const double mass = integrate(pdf, 0.0, std::abs(t), 1e-14).value;
  return t >= 0.0 ? 0.5 + mass : 0.5 - mass;
}

double student_t_critical(double level, double dof) {
  require(level > 0.0 && level < 1.0, "confidence level must lie in (0, 1)");
  const double target = 0.5 + 0.5 * level;
  double lo = 0.0, hi = 1.0;
  while (student_t_cdf(hi, dof) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, dof) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace offrl
