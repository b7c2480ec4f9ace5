#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "curvident/curvature.hpp"
#include "curvident/delta.hpp"

namespace curvident::testing {

inline Tensor random_tensor(int dim, int rank, std::mt19937_64& rng) {
  Tensor t(dim, rank);
  std::uniform_int_distribution<int> val(-3, 3);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = Scalar(val(rng));
  return t;
}

// Sum of Kulkarni-Nomizu squares of random symmetric matrices.
inline Tensor random_curvature_like(int dim, std::mt19937_64& rng, int terms = 3) {
  Tensor r(dim, 4);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int t = 0; t < terms; ++t) {
    std::vector<std::vector<int>> h(dim, std::vector<int>(dim));
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) h[i][j] = h[j][i] = val(rng);
    const int eps = t % 2 == 0 ? 1 : -1;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l)
            r.at({i, j, k, l}) += Scalar(2 * eps * (h[i][l] * h[j][k] - h[i][k] * h[j][l]));
  }
  return r;
}

// Determinant of [delta(lower_s, upper_t)] by the Leibniz formula.
inline int delta_det(const std::vector<int>& lower, const std::vector<int>& upper) {
  const int n = static_cast<int>(lower.size());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  int total = 0;
  do {
    bool alive = true;
    for (int s = 0; s < n && alive; ++s) alive = lower[s] == upper[p[s]];
    if (!alive) continue;
    int inv = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) inv += p[a] > p[b];
    total += inv % 2 == 0 ? 1 : -1;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

// Definitional evaluation: sum over every index assignment of the
// non-free slots.
inline Tensor brute_force(const TensorRefs& ops, const DeltaSpec& spec, int dim) {
  const int n = spec.order;
  std::vector<int> var_of(2 * n, -1);
  std::vector<int> free_slots;
  int n_vars = 0;
  std::vector<bool> traced(2 * n, false);
  for (const auto& [lo, up] : spec.traces) {
    var_of[lo] = var_of[n + up] = n_vars++;
    traced[lo] = traced[n + up] = true;
  }
  for (int s = 0; s < 2 * n; ++s) {
    const auto& ref = s < n ? spec.lower[s] : spec.upper[s - n];
    if (traced[s]) continue;
    if (ref) {
      var_of[s] = n_vars++;
    } else {
      free_slots.push_back(s);
    }
  }
  Tensor out(dim, static_cast<int>(free_slots.size()));
  std::vector<int> val(2 * n);
  std::vector<int> vars(n_vars, 0);
  std::vector<int> lower(n), upper(n);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const std::vector<int> oi = out.multi_index(o);
    for (std::size_t f = 0; f < free_slots.size(); ++f) val[free_slots[f]] = oi[f];
    std::fill(vars.begin(), vars.end(), 0);
    Scalar sum;
    while (true) {
      for (int s = 0; s < 2 * n; ++s)
        if (var_of[s] >= 0) val[s] = vars[var_of[s]];
      Scalar prod(1);
      std::vector<std::vector<int>> idx(ops.size());
      for (std::size_t t = 0; t < ops.size(); ++t) idx[t].assign(ops[t].get().rank(), 0);
      for (int s = 0; s < 2 * n; ++s) {
        const auto& ref = s < n ? spec.lower[s] : spec.upper[s - n];
        if (ref) idx[ref->operand][ref->axis] = val[s];
      }
      for (std::size_t t = 0; t < ops.size() && !prod.is_zero(); ++t) prod *= ops[t].get().at(idx[t]);
      if (!prod.is_zero()) {
        std::copy(val.begin(), val.begin() + n, lower.begin());
        std::copy(val.begin() + n, val.end(), upper.begin());
        const int d = delta_det(lower, upper);
        if (d != 0) sum += prod * Scalar(d);
      }
      int k = n_vars - 1;
      for (; k >= 0; --k) {
        if (++vars[k] < dim) break;
        vars[k] = 0;
      }
      if (k < 0) break;
    }
    out[o] = sum;
  }
  return out;
}

// Direct loops over every index of every term.
inline Scalar gauss_bonnet_brute_force(const CurvatureTensor& r) {
  const int m = r.dim();
  std::vector<Scalar> rho(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int a = 0; a < m; ++a) rho[i * m + j] += r(i, a, a, j);
  auto rh = [&](int i, int j) -> const Scalar& { return rho[i * m + j]; };
  Scalar tau, rho2, norm, rho3, rrhoR, rhoRR, ring, hat;
  for (int a = 0; a < m; ++a) tau += rh(a, a);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      rho2 += rh(a, b) * rh(a, b);
      for (int c = 0; c < m; ++c) {
        rho3 += rh(a, b) * rh(a, c) * rh(b, c);
        for (int d = 0; d < m; ++d) {
          norm += r(a, b, c, d) * r(a, b, c, d);
          rrhoR += rh(a, b) * rh(c, d) * r(a, c, b, d);
          for (int u = 0; u < m; ++u) {
            rhoRR += rh(u, d) * r(a, b, c, u) * r(a, b, c, d);
            for (int v = 0; v < m; ++v) {
              ring += r(a, b, c, d) * r(a, u, c, v) * r(b, v, d, u);
              hat += r(a, b, c, d) * r(a, b, u, v) * r(c, d, u, v);
            }
          }
        }
      }
    }
  return tau * tau * tau - Scalar(12) * tau * rho2 + Scalar(3) * tau * norm + Scalar(16) * rho3 -
         Scalar(24) * rrhoR - Scalar(24) * rhoRR + Scalar(8) * ring - Scalar(2) * hat;
}

}  // namespace curvident::testing
