#pragma once

#include "offrl/types.hpp"

#include <limits>
#include <optional>

namespace offrl {

/// Constants entering the regret bounds. Only the fields a given evaluator
/// reads need to be set.
struct RateConstants {
  // Margin condition and pointwise error bound.
  double alpha = 1.0;
  double delta0 = 1.0;
  double delta1 = 1.0;
  double C = 1.0;
  double a_n = 0.0;
  double gamma = 0.9;
  double Q_max = 1.0;
  // Linear FQI.
  double M = 1.0;
  double B = 1.0;
  double d = 1.0;
  double lambda0 = 1.0;
  // MSBO.
  double zeta = 0.5;
  double M_prime = 1.0;
  double lambda0_prime = 1.0;
};

inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

/// Largest integer i with 2^{i+1}·a_n < δ₁ (requires δ₁ > 2a_n).
int i_max(double a_n, double delta1);

/// Two-term regret bound for a greedy policy:
///   2^{α+1}/((1−γ)δ₀^α) · (1 + C Σ_{i=1}^{i_max} e^{−2^{2i−2}} 2^{(α+1)i+1}) · a_n^{α+1}
///   + 2 Q_max C/(1−γ) · exp(−δ₁²/(4a_n)²).
double thm1_bound(const RateConstants& k);

struct CAlpha {
  double series_value = 0.0;
  double closed_form_upper = 0.0;
  int terms = 0;
};

/// c(α) = Σ_{i≥1} e^{−2^{2i−2}} 2^{(α+1)i+1}, summed until a term falls below
/// 1e-15, and its upper bound
/// 2^{α+1}Γ((α+1)/2, 1)/log 2 + 2(2(α+1)/e)^{(α+1)/2}.
CAlpha c_alpha(double alpha);

/// Finite-α simplification: 2^{α+1}/((1−γ)δ₀^α) (1 + c(α)C) a_n^{α+1}.
double finite_margin_bound(const RateConstants& k);

/// α = ∞: 2 Q_max C/(1−γ) exp(−δ₀²/(4a_n)²); needs a_n < δ₀/2.
double infinite_margin_bound(const RateConstants& k);

/// 144 d (M+B) / ((1−γ) λ₀ √n).
double fqi_an(double n, double d, double M, double B, double gamma, double lambda0);

/// Regret bound for linear FQI; the polynomial regime when α is finite and
/// the exponential regime (n above threshold) when α = ∞.
double cor7_bounds(const RateConstants& k, double n);

/// Smallest n for which the α = ∞ FQI bound applies:
/// (288 d (M+B) / ((1−γ) λ₀ δ₀))².
double fqi_exponential_threshold(const RateConstants& k);

struct TabularBounds {
  double baseline_sqrt_bound = 0.0;
  /// Empty below the sample-size threshold.
  std::optional<double> exponential_bound;
  double threshold = 0.0;
};

/// Baseline 432√π |S|²|A|²(M+B)/((1−γ)²λ₀√n) and, above the threshold
/// (288|S||A|(M+B)/((1−γ)λ₀δ₀))², the exponential bound
/// 12M|S||A|/(1−γ)² exp(−((1−γ)λ₀δ₀/(576|S||A|(M+B)))² n).
TabularBounds tabular_bounds(double S, double A, double M, double B, double gamma, double lambda0,
                             double delta0, double n);

/// The exponential expression alone, without the threshold check.
double tabular_exponential_expression(double S, double A, double M, double B, double gamma,
                                      double lambda0, double delta0, double n);

/// c (√d + M'√(M'²/ζ + M' + ζ + 1)/λ₀') √(log n / n).
double msbo_an(double n, double d, double M_prime, double zeta, double lambda0_prime,
               double c_universal = 1.0);

}  // namespace offrl
