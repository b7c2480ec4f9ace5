#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvident/tensor.hpp"

namespace curvident {

/// Rank-4 tensor known to satisfy the algebraic curvature symmetries:
/// R_ijkl = -R_jikl = -R_ijlk, R_ijkl = R_klij and the first Bianchi
/// identity. Only validate_curvature() creates one.
class CurvatureTensor {
 public:
  int dim() const noexcept { return r_.dim(); }
  const Tensor& tensor() const noexcept { return r_; }
  const Scalar& operator()(int i, int j, int k, int l) const { return r_.at({i, j, k, l}); }

 private:
  explicit CurvatureTensor(Tensor r) : r_(std::move(r)) {}
  friend CurvatureTensor validate_curvature(Tensor r);

  Tensor r_;
};

/// Checks the curvature symmetries. Throws ValidationError naming the first
/// violated identity and its 1-based index tuple.
CurvatureTensor validate_curvature(Tensor r);

/// R_ijkl = k (g_il g_jk - g_ik g_jl).
Tensor constant_curvature_tensor(int dim, const Scalar& k);

/// rho_ij = sum_a R_iaaj.
Tensor ricci(const CurvatureTensor& r);

struct InvariantReport {
  int dim = 0;
  Scalar tau;
  Tensor ricci;
  Scalar ricci_norm_sq;
  Scalar R_norm_sq;
  Tensor t_check;  // R_iabc R_jabc
  Tensor r_check;  // R_iuvj R_abcu R_abcv
  Tensor r_hat2;   // R_ibcd R_jbuv R_cduv
  Tensor r_ring2;  // R_ibcd R_jucv R_budv
  Scalar r_hat0;   // R_abcd R_abuv R_cduv
  Scalar r_ring0;  // R_abcd R_aucv R_budv
  bool einstein = false;
  bool super_einstein = false;
};

InvariantReport invariants(const CurvatureTensor& r);

/// True when t_ij = c g_ij for some scalar c.
bool is_multiple_of_metric(const Tensor& t);

struct TripleProducts {
  Tensor p1;  // R_ibcd R_jbuv R_cudv
  Tensor p2;  // R_ibcd R_jubv R_cudv
  Tensor p3;  // R_ibcd R_jucv R_bvdu
};

TripleProducts triple_products(const CurvatureTensor& r);

/// Weyl part of R for dim m >= 3:
/// W = R - (rho_ps g_qr + rho_qr g_ps - rho_pr g_qs - rho_qs g_pr)/(m-2)
///       + tau (g_ps g_qr - g_pr g_qs)/((m-1)(m-2)).
CurvatureTensor weyl(const CurvatureTensor& r);

struct TwoSteinReport {
  bool is_two_stein = false;
  std::optional<Scalar> mu1;
  std::optional<Scalar> mu2;
  /// First 1-based index tuple where the symmetrized quartic coefficient
  /// differs from mu2 Sym(g g), with the two values.
  std::optional<std::vector<int>> witness;
  std::optional<Scalar> witness_coefficient;
  std::optional<Scalar> witness_expected;
};

/// Tr(R_X) = rho(X, X) and Tr(R_X^2) = C_ijkl X_i X_j X_k X_l with
/// C_ijkl = R_aijb R_bkla, compared after full symmetrization.
TwoSteinReport two_stein_check(const CurvatureTensor& r);

/// Tr(R_X^2) for the Jacobi operator R_X Y = R(Y, X) X at a given vector.
Scalar jacobi_trace_sq(const CurvatureTensor& r, const std::vector<Scalar>& x);

/// Average over all axis permutations.
Tensor symmetrize(const Tensor& t);

}  // namespace curvident
