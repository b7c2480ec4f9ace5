#include "curvident/curvature.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "curvident/error.hpp"

namespace curvident {

namespace {

std::string tuple_str(int i, int j, int k, int l) {
  std::ostringstream os;
  os << '(' << i + 1 << ',' << j + 1 << ',' << k + 1 << ',' << l + 1 << ')';
  return os.str();
}

Tensor multiple_of_metric(int dim, const Scalar& c) { return Tensor::metric(dim) * c; }

}  // namespace

CurvatureTensor validate_curvature(Tensor r) {
  if (r.rank() != 4) throw ValidationError("curvature tensor must have rank 4, got " + std::to_string(r.rank()));
  const int n = r.dim();
  // One pass per identity so the reported violation is the most basic one.
  auto each = [n](auto&& check) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) check(i, j, k, l);
  };
  each([&](int i, int j, int k, int l) {
    if (!(r.at({i, j, k, l}) == -r.at({j, i, k, l}))) {
      throw ValidationError("antisymmetry R_ijkl = -R_jikl violated at " + tuple_str(i, j, k, l));
    }
  });
  each([&](int i, int j, int k, int l) {
    if (!(r.at({i, j, k, l}) == -r.at({i, j, l, k}))) {
      throw ValidationError("antisymmetry R_ijkl = -R_ijlk violated at " + tuple_str(i, j, k, l));
    }
  });
  each([&](int i, int j, int k, int l) {
    if (!(r.at({i, j, k, l}) == r.at({k, l, i, j}))) {
      throw ValidationError("pair symmetry R_ijkl = R_klij violated at " + tuple_str(i, j, k, l));
    }
  });
  each([&](int i, int j, int k, int l) {
    if (!(r.at({i, j, k, l}) + r.at({j, k, i, l}) + r.at({k, i, j, l})).is_zero()) {
      throw ValidationError("first Bianchi identity violated at " + tuple_str(i, j, k, l));
    }
  });
  return CurvatureTensor(std::move(r));
}

Tensor constant_curvature_tensor(int dim, const Scalar& k) {
  Tensor r(dim, 4);
  if (k.is_zero()) return r;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (i == j) continue;
      r.at({i, j, j, i}) = k;
      r.at({i, j, i, j}) = -k;
    }
  return r;
}

Tensor ricci(const CurvatureTensor& r) { return einsum("iaaj->ij", {r.tensor()}); }

bool is_multiple_of_metric(const Tensor& t) {
  if (t.rank() != 2) return false;
  return tensors_equal(t, multiple_of_metric(t.dim(), t.at({0, 0})));
}

InvariantReport invariants(const CurvatureTensor& curv) {
  const Tensor& r = curv.tensor();
  const int m = curv.dim();
  InvariantReport rep;
  rep.dim = m;
  rep.ricci = ricci(curv);
  rep.tau = einsum("aa->", {rep.ricci}).value();
  rep.ricci_norm_sq = einsum("ab,ab->", {rep.ricci, rep.ricci}).value();
  rep.R_norm_sq = einsum("abcd,abcd->", {r, r}).value();
  rep.t_check = einsum("iabc,jabc->ij", {r, r});
  const Tensor rr = einsum("abcu,abcv->uv", {r, r});
  rep.r_check = einsum("iuvj,uv->ij", {r, rr});
  const Tensor s = einsum("cduv,jbuv->cdjb", {r, r});
  rep.r_hat2 = einsum("ibcd,cdjb->ij", {r, s});
  rep.r_ring2 = einsum("ibcd,jucv,budv->ij", {r, r, r});
  rep.r_hat0 = einsum("aa->", {rep.r_hat2}).value();
  rep.r_ring0 = einsum("aa->", {rep.r_ring2}).value();
  const Rational inv_m(1, m);
  rep.einstein = tensors_equal(rep.ricci, multiple_of_metric(m, rep.tau * Scalar(inv_m)));
  rep.super_einstein = rep.einstein && tensors_equal(rep.t_check, multiple_of_metric(m, rep.R_norm_sq * Scalar(inv_m)));
  return rep;
}

TripleProducts triple_products(const CurvatureTensor& curv) {
  const Tensor& r = curv.tensor();
  return {einsum("ibcd,jbuv,cudv->ij", {r, r, r}), einsum("ibcd,jubv,cudv->ij", {r, r, r}),
          einsum("ibcd,jucv,bvdu->ij", {r, r, r})};
}

CurvatureTensor weyl(const CurvatureTensor& curv) {
  const int m = curv.dim();
  if (m < 3) throw PreconditionError("weyl tensor requires dimension >= 3");
  const Tensor rho = ricci(curv);
  const Scalar tau = einsum("aa->", {rho}).value();
  const Scalar c1(Rational(1, m - 2));
  const Scalar c2 = tau * Scalar(Rational(1, (m - 1) * (m - 2)));
  Tensor w = curv.tensor();
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          Scalar corr;
          if (q == r) corr += rho.at({p, s});
          if (p == s) corr += rho.at({q, r});
          if (q == s) corr -= rho.at({p, r});
          if (p == r) corr -= rho.at({q, s});
          Scalar& out = w.at({p, q, r, s});
          if (!corr.is_zero()) out -= c1 * corr;
          const int gg = (p == s && q == r ? 1 : 0) - (p == r && q == s ? 1 : 0);
          if (gg != 0) out += c2 * Scalar(gg);
        }
  return validate_curvature(std::move(w));
}

Tensor symmetrize(const Tensor& t) {
  const int rank = t.rank();
  std::vector<int> perm(rank);
  std::iota(perm.begin(), perm.end(), 0);
  Tensor sum(t.dim(), rank);
  std::int64_t count = 0;
  do {
    sum += t.transposed(perm);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum * Scalar(Rational(1, count));
}

TwoSteinReport two_stein_check(const CurvatureTensor& curv) {
  const int m = curv.dim();
  const Tensor& r = curv.tensor();
  TwoSteinReport rep;
  const Tensor rho = ricci(curv);
  if (is_multiple_of_metric(rho)) rep.mu1 = rho.at({0, 0});

  const Tensor c = einsum("aijb,bkla->ijkl", {r, r});
  const Tensor sym = symmetrize(c);
  const Scalar mu2 = sym.at({0, 0, 0, 0});
  const Tensor g = Tensor::metric(m);
  const Tensor sym_gg = symmetrize(tensor_product(g, g));
  const Tensor expected = sym_gg * mu2;
  for (std::size_t i = 0; i < sym.size(); ++i) {
    if (!(sym[i] == expected[i])) {
      std::vector<int> idx = sym.multi_index(i);
      for (int& v : idx) ++v;
      rep.witness = idx;
      rep.witness_coefficient = sym[i];
      rep.witness_expected = expected[i];
      break;
    }
  }
  if (!rep.witness) rep.mu2 = mu2;
  rep.is_two_stein = rep.mu1.has_value() && rep.mu2.has_value();
  return rep;
}

Scalar jacobi_trace_sq(const CurvatureTensor& curv, const std::vector<Scalar>& x) {
  const int m = curv.dim();
  if (static_cast<int>(x.size()) != m) throw ShapeError("vector length does not match dimension");
  // J_ab = <R_X e_a, e_b> = R(e_a, X, X, e_b).
  std::vector<Scalar> jac(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Scalar v;
      for (int i = 0; i < m; ++i) {
        if (x[i].is_zero()) continue;
        for (int j = 0; j < m; ++j) {
          if (x[j].is_zero()) continue;
          const Scalar& rv = curv(a, i, j, b);
          if (!rv.is_zero()) v += rv * x[i] * x[j];
        }
      }
      jac[a * m + b] = v;
    }
  Scalar tr;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) tr.add_product(jac[a * m + b], jac[b * m + a]);
  return tr;
}

}  // namespace curvident
