// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "curvident/identities.hpp"
#include "curvident/models.hpp"
#include "curvident/report.hpp"
#include "support.hpp"

using namespace curvident;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

Scalar frac(std::int64_t n, std::int64_t d) { return Scalar(Rational(n, d)); }

Tensor diag(const std::vector<Scalar>& d) {
  Tensor t(static_cast<int>(d.size()), 2);
  for (std::size_t i = 0; i < d.size(); ++i) t.at({static_cast<int>(i), static_cast<int>(i)}) = d[i];
  return t;
}

Tensor delta_times(int dim, const Scalar& c) { return Tensor::metric(dim) * c; }

std::vector<Scalar> unit(int dim, std::initializer_list<std::pair<int, int>> entries) {
  std::vector<Scalar> x(dim);
  for (auto [i, v] : entries) x[i] = Scalar(v);
  return x;
}

Outcome example5d_products() {
  Outcome o;
  for (int ki : {1, 2}) {
    const Scalar k(ki), k2 = k * k, k3 = k2 * k;
    const std::string at = "k=" + std::to_string(ki) + ": ";
    const CurvatureTensor r = build(ModelSpec::example5d(k));
    const InvariantReport v = invariants(r);
    o.require(v.tau == Scalar(10) * k, at + "tau");
    o.require(v.R_norm_sq == Scalar(28) * k2, at + "|R|^2");
    o.require(tensors_equal(v.t_check, diag({k2 * Scalar(4), k2 * Scalar(4), k2 * Scalar(4), k2 * Scalar(8),
                                             k2 * Scalar(8)})),
              at + "T_check table");
    o.require(tensors_equal(v.r_check, diag({k3 * Scalar(8), k3 * Scalar(8), k3 * Scalar(8), k3 * Scalar(16),
                                             k3 * Scalar(16)})),
              at + "R_check table");
    o.require(tensors_equal(v.r_hat2, diag({k3 * Scalar(-8), k3 * Scalar(-8), k3 * Scalar(-8), k3 * Scalar(-32),
                                            k3 * Scalar(-32)})),
              at + "R_hat table");
    o.require(tensors_equal(v.r_ring2, diag({k3 * Scalar(-2), k3 * Scalar(-2), k3 * Scalar(-2), Scalar(0), Scalar(0)})),
              at + "R_ring table");
    o.require(thmA_einstein_residual(r).is_zero, at + "thmA-a residual nonzero");
    o.require(!thmA_super_residual(r).is_zero, at + "thmA-b residual vanished");
  }
  return o;
}

Outcome sl3so3() {
  Outcome o;
  const CurvatureTensor r = build(ModelSpec::sl3so3());
  const InvariantReport v = invariants(r);
  o.require(tensors_equal(v.ricci, delta_times(5, Scalar(-3))), "rho");
  o.require(v.tau == Scalar(-15), "tau");
  o.require(v.R_norm_sq == Scalar(75), "|R|^2");
  o.require(tensors_equal(v.r_hat2, delta_times(5, Scalar(75))), "R_hat");
  o.require(tensors_equal(v.r_ring2, delta_times(5, frac(15, 4))), "R_ring");
  o.require(thmA_super_residual(r).is_zero, "thmA-b residual nonzero");
  o.require(v.super_einstein, "super-Einstein flag");
  return o;
}

Outcome example6d_product() {
  Outcome o;
  const CurvatureTensor r = build(ModelSpec::example6d(Scalar(1)));
  const InvariantReport v = invariants(r);
  o.require(v.tau == Scalar(12), "tau");
  o.require(v.R_norm_sq == Scalar(24), "|R|^2");
  o.require(v.r_ring0 == Scalar(-12), "R_ring0");
  o.require(v.r_hat0 == Scalar(-48), "R_hat0");
  o.require(tensors_equal(v.r_check, delta_times(6, Scalar(8))), "R_check");
  o.require(tensors_equal(v.r_hat2, delta_times(6, Scalar(-8))), "R_hat");
  o.require(tensors_equal(v.r_ring2, delta_times(6, Scalar(-2))), "R_ring");
  o.require(tensors_equal(v.t_check, delta_times(6, Scalar(4))), "T_check");
  o.require(thmB_einstein_residual(r).is_zero, "thmB-a residual nonzero");
  o.require(thmB_super_residual(r).is_zero, "thmB-b residual nonzero");
  o.require(!two_stein_check(r).is_two_stein, "2-stein check passed");
  // Tr(R_X^2) = 2k^2 (|X1|^4 + |X2|^4) with X1, X2 the two factor parts.
  const Scalar axis = jacobi_trace_sq(r, unit(6, {{0, 1}}));
  const Scalar diagonal = jacobi_trace_sq(r, unit(6, {{0, 1}, {3, 1}}));
  o.require(axis == Scalar(2), "Tr(R_X^2) at e1");
  o.require(diagonal == Scalar(4), "Tr(R_X^2) at e1 + e4");
  // |e1 + e4|^4 = 4, so a single mu2 would need 4 = 2 * 4.
  o.require(!(diagonal == axis * Scalar(4)), "no obstruction between axis and diagonal");
  o.require(jacobi_trace_sq(r, unit(6, {{0, 1}, {1, 2}, {3, 3}, {5, 1}})) == Scalar(2 * (25 + 100)),
            "Tr(R_X^2) off the axes");
  return o;
}

Outcome nikolayevsky_blocks() {
  Outcome o;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {0, 1}, {1, 0}}) {
    const std::string at = "(" + std::to_string(a) + "," + std::to_string(b) + "): ";
    const CurvatureTensor r = build(ModelSpec::nikolayevsky(Scalar(a), Scalar(b)));
    const std::array<Scalar, 4> blk = pa5_blocks(r, 0, 1, 2, 3);
    o.require(blk[0] == Scalar(2 * (2 * a - 5 * b) * b), at + "first block");
    o.require(blk[1] == Scalar(2 * (2 * a - 5 * b) * b), at + "second block");
    o.require(blk[2] == Scalar(2 * (2 * a + b) * b), at + "third block");
    o.require(blk[3] == Scalar(-6 * (2 * a - 3 * b) * b), at + "fourth block");
    o.require(pa5_residual(r).is_zero, at + "pa5 residual nonzero");
  }
  return o;
}

Outcome patterson_suite() {
  Outcome o;
  const std::vector<std::pair<int, int>> cases = {{4, 1}, {4, 2}, {5, 1}, {5, 2}, {6, 1}, {6, 2}, {6, 3}};
  for (auto [dim, r] : cases) {
    for (int t = 0; t < 100; ++t) {
      const CurvatureTensor rt = random_curvature(dim, 1000 + t, 4);
      const ResidualReport rep = patterson_residual(rt, r, auto_mode(dim, r));
      o.require(rep.is_zero, "patterson (" + std::to_string(dim) + "," + std::to_string(r) + ") seed " +
                                 std::to_string(1000 + t));
    }
  }
  for (int dim : {5, 6}) {
    for (int t = 0; t < 100; ++t) {
      const CurvatureTensor rt = random_curvature(dim, 1000 + t, 4);
      const ResidualReport rep = weyl_patterson_residual(rt, 2);
      const std::string at = "weyl (" + std::to_string(dim) + ",2) seed " + std::to_string(1000 + t);
      o.require(rep.is_zero, at);
      o.require(tensors_equal(weyl_patterson_expansion(rt), rep.residual), at + ": expansion differs");
    }
  }
  return o;
}

Outcome einstein_suite() {
  Outcome o;
  for (int t = 0; t < 50; ++t) {
    const CurvatureTensor r = einsteinize(random_curvature(5, 2000 + t, 4), Scalar(1));
    const std::string at = "dim 5 seed " + std::to_string(2000 + t) + ": ";
    o.require(lemma5_einstein_residual(r).is_zero, at + "lemma5");
    o.require(thmA_einstein_residual(r).is_zero, at + "thmA-a");
  }
  for (int t = 0; t < 50; ++t) {
    const CurvatureTensor r = einsteinize(random_curvature(6, 2000 + t, 4), Scalar(1));
    const std::string at = "dim 6 seed " + std::to_string(2000 + t) + ": ";
    o.require(lemma6_einstein_residual(r).is_zero, at + "lemma6");
    for (const SideBySide& g : lemma6_groups(r)) o.require(g.holds(), at + g.label);
    const ResidualReport a = thmB_einstein_residual(r);
    const ResidualReport b = thmB_einstein_residual_rearranged(r);
    o.require(a.is_zero, at + "thmB-a");
    o.require(b.is_zero, at + "rearranged thmB-a");
    o.require(tensors_equal(a.residual, b.residual), at + "the two arrangements differ");
  }
  return o;
}

Outcome transvections() {
  Outcome o;
  for (int t = 0; t < 10; ++t) {
    const CurvatureTensor r5 = einsteinize(random_curvature(5, 3000 + t, 4), Scalar(1));
    const std::string at5 = "dim 5 seed " + std::to_string(3000 + t) + ": ";
    o.require(tensors_equal(lemma5_transvection(r5), thmA_einstein_residual(r5).residual * Scalar(2)),
              at5 + "transvection");
    for (const SideBySide& s : lemma5_transvection_steps(r5)) o.require(s.holds(), at5 + s.label);

    const CurvatureTensor r6 = einsteinize(random_curvature(6, 3000 + t, 4), Scalar(1));
    const std::string at6 = "dim 6 seed " + std::to_string(3000 + t) + ": ";
    const std::vector<SideBySide> steps = lemma6_transvection_steps(r6);
    o.require(steps.size() == 22, at6 + "step count");
    for (const SideBySide& s : steps) o.require(s.holds(), at6 + s.label);
    o.require(tensors_equal(lemma6_transvection(r6), thmB_einstein_residual(r6).residual * frac(-1, 2)),
              at6 + "transvection");
  }
  return o;
}

Outcome gauss_bonnet() {
  Outcome o;
  const CurvatureTensor r = build(ModelSpec::constant(6, Scalar(1)));
  const Scalar bracket = gauss_bonnet_integrand_6(r);
  o.require(bracket == testing::gauss_bonnet_brute_force(r), "bracket differs from brute force");
  // Vol(S^6) / (384 pi^3) = (16/15) / 384 once pi^3 cancels.
  o.require(bracket * frac(16, 15 * 384) == Scalar(2), "chi(S^6) != 2");

  for (const ModelSpec& spec : {ModelSpec::example6d(Scalar(1)), ModelSpec::random_einstein(6, 4000, 4, Scalar(2))}) {
    const CurvatureTensor c = build(spec);
    const InvariantReport v = invariants(c);
    const Tensor& rho = v.ricci;
    const Tensor& rt = c.tensor();
    const Scalar& tau = v.tau;
    const Scalar pieces = tau * tau * tau - Scalar(12) * tau * v.ricci_norm_sq + Scalar(3) * tau * v.R_norm_sq +
                          Scalar(16) * einsum("ab,ac,bc->", {rho, rho, rho}).value() -
                          Scalar(24) * einsum("ab,cd,acbd->", {rho, rho, rt}).value() -
                          Scalar(24) * einsum("uv,uv->", {rho, v.t_check}).value() +
                          Scalar(8) * (v.r_ring0 - v.r_hat0 * frac(1, 4)) - Scalar(2) * v.r_hat0;
    const Scalar b = gauss_bonnet_integrand_6(c);
    o.require(b == pieces, to_string(spec.kind) + ": reassembly differs");
    o.require(b == testing::gauss_bonnet_brute_force(c), to_string(spec.kind) + ": brute force differs");
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const ResolvedModel m = resolve(ModelSpec::random_einstein(6, 5000, 3, Scalar(-1)));
  std::string first;
  for (int threads : {1, 2, 4, 1}) {
    VerifyOptions opts;
    opts.threads = threads;
    const std::string s = run_report_to_json(run_verify(m, opts)).dump(2);
    if (first.empty()) first = s;
    o.require(s == first, "verify JSON changed with " + std::to_string(threads) + " threads");
  }
  for (IdentityId id : {IdentityId::patterson, IdentityId::thmB_b}) {
    RandomCheckOptions rc;
    rc.dim = 6;
    rc.identity = id;
    rc.trials = 8;
    rc.seed = 5000;
    std::string base;
    for (int threads : {1, 3, 8, 1}) {
      rc.threads = threads;
      const std::string s = random_check_to_json(run_random_check(rc)).dump(2);
      if (base.empty()) base = s;
      o.require(s == base, to_string(id) + " random-check JSON changed with " + std::to_string(threads) + " threads");
    }
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dim-5 product S3(k) x S2(2k), k = 1, 2: tables, Einstein identity holds, super-Einstein one fails",
       example5d_products},
      {"SL(3)/SO(3): invariants and the dim-5 super-Einstein identity", sl3so3},
      {"dim-6 product S3(1) x S3(1): invariants, dim-6 identities, 2-stein obstruction", example6d_product},
      {"Nikolayevsky frame: block values at (1,2,3,4) and the rank-4 residual", nikolayevsky_blocks},
      {"delta identity on 100 random tensors per (dim, r); Weyl form and its expansions", patterson_suite},
      {"einsteinized random tensors: dim-5 and dim-6 Einstein identities, 34 groups, both arrangements",
       einstein_suite},
      {"transvection cross-checks on 10 einsteinized tensors", transvections},
      {"Gauss-Bonnet bracket: unit 6-sphere and reassembly from invariants", gauss_bonnet},
      {"byte-identical JSON across reruns and thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s", o.ok ? "PASS" : "FAIL", c + 1, criteria[c].first.c_str());
    if (!o.ok) std::printf(" [%s]", o.detail.c_str());
    std::printf("\n");
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  return failed;
}
