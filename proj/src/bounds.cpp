#include "offrl/bounds.hpp"

#include "offrl/numerics.hpp"

#include <cmath>

namespace offrl {

namespace {

void check_gamma(double gamma) { require(gamma > 0.0 && gamma < 1.0, "γ must lie in (0, 1)"); }

// log of e^{−2^{2i−2}} 2^{(α+1)i+1}
double log_series_term(double alpha, int i) {
  return -std::ldexp(1.0, 2 * i - 2) + ((alpha + 1.0) * i + 1.0) * M_LN2;
}

}  // namespace

int i_max(double a_n, double delta1) {
  require(a_n > 0.0 && delta1 > 2.0 * a_n, "need δ₁ > 2a_n > 0");
  int i = 0;
  while (std::ldexp(a_n, i + 2) < delta1) ++i;
  return i;
}

double thm1_bound(const RateConstants& k) {
  check_gamma(k.gamma);
  require(std::isfinite(k.alpha) && k.alpha >= 0.0, "the two-term bound needs finite α ≥ 0");
  require(k.delta0 > 0.0 && k.C > 0.0 && k.Q_max >= 0.0, "δ₀, C must be positive");
  require(k.delta1 >= k.delta0, "need δ₁ ≥ δ₀");
  require(k.a_n > 0.0 && k.delta1 > 2.0 * k.a_n, "need δ₁ > 2a_n");
  const int top = i_max(k.a_n, k.delta1);
  double peel = 0.0;
  for (int i = 1; i <= top; ++i) peel += std::exp(log_series_term(k.alpha, i));
  const double poly = std::pow(2.0, k.alpha + 1.0) / ((1.0 - k.gamma) * std::pow(k.delta0, k.alpha)) *
                      (1.0 + k.C * peel) * std::pow(k.a_n, k.alpha + 1.0);
  const double ratio = k.delta1 / (4.0 * k.a_n);
  const double tail = 2.0 * k.Q_max * k.C / (1.0 - k.gamma) * std::exp(-ratio * ratio);
  return poly + tail;
}

CAlpha c_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0, "c(α) needs finite α ≥ 0");
  CAlpha out;
  for (int i = 1;; ++i) {
    const double term = std::exp(log_series_term(alpha, i));
    out.series_value += term;
    out.terms = i;
    // Terms rise while 2^{2i−2} < (α+1)i·log 2, then collapse double-exponentially.
    if (term < 1e-15 && std::ldexp(1.0, 2 * i - 2) > (alpha + 1.0) * M_LN2) break;
  }
  const double s = 0.5 * (alpha + 1.0);
  out.closed_form_upper = std::pow(2.0, alpha + 1.0) * upper_incomplete_gamma(s, 1.0) / M_LN2 +
                          2.0 * std::pow(2.0 * (alpha + 1.0) / M_E, s);
  return out;
}

double finite_margin_bound(const RateConstants& k) {
  check_gamma(k.gamma);
  require(std::isfinite(k.alpha) && k.alpha >= 0.0, "needs finite α ≥ 0");
  require(k.delta0 > 0.0 && k.a_n > 0.0, "δ₀ and a_n must be positive");
  return std::pow(2.0, k.alpha + 1.0) / ((1.0 - k.gamma) * std::pow(k.delta0, k.alpha)) *
         (1.0 + c_alpha(k.alpha).series_value * k.C) * std::pow(k.a_n, k.alpha + 1.0);
}

double infinite_margin_bound(const RateConstants& k) {
  check_gamma(k.gamma);
  require(k.delta0 > 0.0 && k.a_n > 0.0, "δ₀ and a_n must be positive");
  if (!(k.a_n < 0.5 * k.delta0)) throw RegimeError("the α = ∞ bound needs a_n < δ₀/2");
  const double ratio = k.delta0 / (4.0 * k.a_n);
  return 2.0 * k.Q_max * k.C / (1.0 - k.gamma) * std::exp(-ratio * ratio);
}

double fqi_an(double n, double d, double M, double B, double gamma, double lambda0) {
  check_gamma(gamma);
  require(n > 0.0 && d > 0.0 && lambda0 > 0.0 && M >= 0.0 && B >= 0.0,
          "n, d, λ₀ must be positive and M, B nonnegative");
  return 144.0 * d * (M + B) / ((1.0 - gamma) * lambda0 * std::sqrt(n));
}

double fqi_exponential_threshold(const RateConstants& k) {
  check_gamma(k.gamma);
  require(k.delta0 > 0.0 && k.lambda0 > 0.0, "δ₀ and λ₀ must be positive");
  const double root = 288.0 * k.d * (k.M + k.B) / ((1.0 - k.gamma) * k.lambda0 * k.delta0);
  return root * root;
}

double cor7_bounds(const RateConstants& k, double n) {
  check_gamma(k.gamma);
  require(n > 0.0 && k.d > 0.0 && k.lambda0 > 0.0 && k.delta0 > 0.0, "n, d, λ₀, δ₀ must be positive");
  const double g1 = 1.0 - k.gamma;
  if (std::isinf(k.alpha)) {
    if (n < fqi_exponential_threshold(k))
      throw RegimeError("n is below the threshold of the exponential FQI regime");
    const double rate = g1 * k.lambda0 * k.delta0 / (576.0 * k.d * (k.M + k.B));
    return 12.0 * k.M * k.d / (g1 * g1) * std::exp(-rate * rate * n);
  }
  require(k.alpha >= 0.0, "α must be nonnegative");
  const double e = k.alpha + 1.0;
  const double log_value = e * std::log(288.0) + std::log1p(6.0 * k.d * c_alpha(k.alpha).series_value) -
                           std::log(g1) - k.alpha * std::log(k.delta0) +
                           e * std::log(k.d * (k.M + k.B) / (g1 * k.lambda0)) - 0.5 * e * std::log(n);
  return std::exp(log_value);
}

double tabular_exponential_expression(double S, double A, double M, double B, double gamma,
                                      double lambda0, double delta0, double n) {
  check_gamma(gamma);
  const double sa = S * A;
  const double g1 = 1.0 - gamma;
  const double rate = g1 * lambda0 * delta0 / (576.0 * sa * (M + B));
  return 12.0 * M * sa / (g1 * g1) * std::exp(-rate * rate * n);
}

TabularBounds tabular_bounds(double S, double A, double M, double B, double gamma, double lambda0,
                             double delta0, double n) {
  check_gamma(gamma);
  require(S >= 1.0 && A >= 1.0 && n > 0.0 && lambda0 > 0.0 && delta0 > 0.0 && M >= 0.0 && B >= 0.0,
          "tabular bounds need positive sizes, n, λ₀, δ₀");
  const double sa = S * A;
  const double g1 = 1.0 - gamma;
  TabularBounds out;
  out.baseline_sqrt_bound =
      432.0 * std::sqrt(M_PI) * sa * sa * (M + B) / (g1 * g1 * lambda0 * std::sqrt(n));
  const double root = 288.0 * sa * (M + B) / (g1 * lambda0 * delta0);
  out.threshold = root * root;
  if (n >= out.threshold)
    out.exponential_bound = tabular_exponential_expression(S, A, M, B, gamma, lambda0, delta0, n);
  return out;
}

double msbo_an(double n, double d, double M_prime, double zeta, double lambda0_prime,
               double c_universal) {
  require(n >= 2.0, "needs n ≥ 2");
  require(d > 0.0 && M_prime >= 0.0 && zeta > 0.0 && lambda0_prime > 0.0 && c_universal > 0.0,
          "MSBO constants must be positive");
  const double inner = M_prime * M_prime / zeta + M_prime + zeta + 1.0;
  return c_universal * (std::sqrt(d) + M_prime * std::sqrt(inner) / lambda0_prime) *
         std::sqrt(std::log(n) / n);
}

}  // namespace offrl
