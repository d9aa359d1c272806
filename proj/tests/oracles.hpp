#pragma once
// Reference computations used by the tests. They are written with plain
// loops and std containers, deliberately sharing no code with the library
// beyond the model types they read.

#include "offrl/dataset.hpp"
#include "offrl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;

inline Table rewards_of(const offrl::TabularMdp& m) {
  Table r(m.num_states(), std::vector<double>(m.num_actions()));
  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.num_actions(); ++a) r[s][a] = m.rewards()(s, a);
  return r;
}

inline double prob(const offrl::TabularMdp& m, int s, int a, int sp) {
  return m.transitions()(s * m.num_actions() + a, sp);
}

// Plain Q-iteration run far past convergence.
inline Table q_iteration(const offrl::TabularMdp& m, int sweeps) {
  const int S = m.num_states(), A = m.num_actions();
  Table q(S, std::vector<double>(A, 0.0));
  for (int k = 0; k < sweeps; ++k) {
    std::vector<double> v(S);
    for (int s = 0; s < S; ++s) {
      v[s] = q[s][0];
      for (int a = 1; a < A; ++a) v[s] = std::max(v[s], q[s][a]);
    }
    Table next(S, std::vector<double>(A));
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        double acc = 0.0;
        for (int sp = 0; sp < S; ++sp) acc += prob(m, s, a, sp) * v[sp];
        next[s][a] = m.rewards()(s, a) + m.discount() * acc;
      }
    q = next;
  }
  return q;
}

// State distribution after t steps of π, for t = 0..T, accumulated into the
// discounted occupancy (1−γ)Σ γᵗ P(s_t = ·).
inline std::vector<double> truncated_occupancy(const offrl::TabularMdp& m,
                                               const std::vector<int>& pi, int T) {
  const int S = m.num_states();
  std::vector<double> p(S), occ(S, 0.0);
  for (int s = 0; s < S; ++s) p[s] = m.initial_dist()[s];
  double disc = 1.0;
  for (int t = 0; t <= T; ++t) {
    for (int s = 0; s < S; ++s) occ[s] += (1.0 - m.discount()) * disc * p[s];
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s)
      for (int sp = 0; sp < S; ++sp) next[sp] += p[s] * prob(m, s, pi[s], sp);
    p = next;
    disc *= m.discount();
  }
  return occ;
}

// Σ_{t≤T} γᵗ E[r_t] by propagating the state distribution.
inline double truncated_value(const offrl::TabularMdp& m, const std::vector<int>& pi, int T) {
  const int S = m.num_states();
  std::vector<double> p(S);
  for (int s = 0; s < S; ++s) p[s] = m.initial_dist()[s];
  double value = 0.0, disc = 1.0;
  for (int t = 0; t <= T; ++t) {
    for (int s = 0; s < S; ++s) value += disc * p[s] * m.rewards()(s, pi[s]);
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s)
      for (int sp = 0; sp < S; ++sp) next[sp] += p[s] * prob(m, s, pi[s], sp);
    p = next;
    disc *= m.discount();
  }
  return value;
}

// Gauss–Jordan elimination with partial pivoting on a dense copy.
inline std::vector<double> solve(Table a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Per-cell sample-mean Bellman backups: Q_k(s,a) = mean over the samples in
// cell (s,a) of r + γ max_a' Q_{k−1}(s', a'). Unvisited cells stay at 0.
inline Table empirical_q_iteration(const offrl::Dataset& d, int S, int A, double gamma, int K) {
  Table q(S, std::vector<double>(A, 0.0));
  for (int k = 0; k < K; ++k) {
    std::map<std::pair<int, int>, std::pair<double, int>> acc;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const int s = static_cast<int>(d.states()(i, 0));
      const int sp = static_cast<int>(d.next_states()(i, 0));
      double best = q[sp][0];
      for (int a = 1; a < A; ++a) best = std::max(best, q[sp][a]);
      auto& cell = acc[{s, d.actions()[i]}];
      cell.first += d.rewards()[i] + gamma * best;
      cell.second += 1;
    }
    for (auto& [key, v] : acc) q[key.first][key.second] = v.first / v.second;
  }
  return q;
}

}  // namespace oracle
