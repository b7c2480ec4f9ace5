#include "curvident/identities.hpp"

#include <functional>
#include <iterator>
#include <stdexcept>

#include "curvident/delta.hpp"
#include "curvident/error.hpp"

namespace curvident {

namespace {

Scalar frac(std::int64_t n, std::int64_t d) { return Scalar(Rational(n, d)); }

struct Factor {
  const Tensor* t;
  std::string_view labels;
};

// Accumulates sums of products of factor tensors and metric pairs into a
// tensor whose axes carry single-letter labels. Every output label must be
// covered exactly once by a factor axis or a metric pair.
class Assembler {
 public:
  Assembler(int dim, std::string_view labels) : out_(dim, static_cast<int>(labels.size())), labels_(labels) {}

  void add(const Scalar& c, std::initializer_list<Factor> factors, std::string_view gpairs = "") {
    if (c.is_zero()) return;
    const int rank = out_.rank();
    std::vector<int> covered(rank, 0);

    struct Prepared {
      std::vector<int> axes;
      std::vector<std::pair<std::vector<int>, const Scalar*>> entries;
    };
    std::vector<Prepared> prep;
    for (const Factor& f : factors) {
      Prepared p;
      for (char ch : f.labels) {
        p.axes.push_back(axis(ch));
        ++covered[p.axes.back()];
      }
      if (static_cast<int>(p.axes.size()) != f.t->rank()) throw std::logic_error("factor label count mismatch");
      for (std::size_t lin = 0; lin < f.t->size(); ++lin) {
        const Scalar& v = (*f.t)[lin];
        if (!v.is_zero()) p.entries.emplace_back(f.t->multi_index(lin), &v);
      }
      prep.push_back(std::move(p));
    }
    std::vector<std::pair<int, int>> pairs;
    std::string letters;
    for (char ch : gpairs)
      if (ch != ' ' && ch != ',') letters.push_back(ch);
    if (letters.size() % 2 != 0) throw std::logic_error("odd metric pair list");
    for (std::size_t s = 0; s < letters.size(); s += 2) {
      pairs.emplace_back(axis(letters[s]), axis(letters[s + 1]));
      ++covered[pairs.back().first];
      ++covered[pairs.back().second];
    }
    for (int n : covered)
      if (n != 1) throw std::logic_error("output labels not covered exactly once");

    const int dim = out_.dim();
    std::vector<int> idx(rank, 0);
    std::function<void(std::size_t, const Scalar&)> walk_pairs;
    std::function<void(std::size_t, const Scalar&)> walk_factors;
    walk_pairs = [&](std::size_t p, const Scalar& coef) {
      if (p == pairs.size()) {
        out_.at(idx) += coef;
        return;
      }
      for (int v = 0; v < dim; ++v) {
        idx[pairs[p].first] = v;
        idx[pairs[p].second] = v;
        walk_pairs(p + 1, coef);
      }
    };
    walk_factors = [&](std::size_t f, const Scalar& coef) {
      if (f == prep.size()) {
        walk_pairs(0, coef);
        return;
      }
      for (const auto& [mi, val] : prep[f].entries) {
        for (std::size_t k = 0; k < mi.size(); ++k) idx[prep[f].axes[k]] = mi[k];
        walk_factors(f + 1, coef * *val);
      }
    };
    walk_factors(0, c);
  }

  Tensor take() { return std::move(out_); }

 private:
  int axis(char ch) const {
    const auto pos = labels_.find(ch);
    if (pos == std::string_view::npos) throw std::logic_error(std::string("unknown label ") + ch);
    return static_cast<int>(pos);
  }

  Tensor out_;
  std::string_view labels_;
};

constexpr std::string_view kSix = "ihjklm";

void require_dim(const CurvatureTensor& r, int dim, const char* name) {
  if (r.dim() != dim) {
    throw PreconditionError(std::string(name) + " requires dimension " + std::to_string(dim) + ", got " +
                            std::to_string(r.dim()));
  }
}

Tensor transvect5(const Tensor& x, const Tensor& r) { return einsum("ijkl,pjkl->ip", {x, r}); }
Tensor transvect6(const Tensor& x, const Tensor& r) { return einsum("ihjklm,ihjk->lm", {x, r}); }

Tensor metric_times(int dim, const Scalar& c) { return Tensor::metric(dim) * c; }

// Signed metric triples g_.. g_.. g_.. of the first block.
struct Triple {
  std::string_view pairs;
  int sign;
};
constexpr Triple kTriples[] = {
    {"ij hk lm", 1}, {"ij hm lk", -1}, {"ik hj lm", -1}, {"ik hm lj", 1}, {"im hj lk", 1}, {"im hk lj", -1},
};

// Tc_xy g g terms; the Einstein identity's second block is -1/2 times the
// signed sum, and groups 7..24 carry the same signs.
struct PairTerm {
  std::string_view xy;
  std::string_view pairs;
  int sign;
};
constexpr PairTerm kPairTerms[] = {
    {"ij", "hk lm", 1},  {"ij", "hm lk", -1}, {"ik", "hj lm", -1}, {"ik", "hm lj", 1},  {"im", "hj lk", 1},
    {"im", "hk lj", -1}, {"hj", "ik lm", -1}, {"hj", "im lk", 1},  {"hk", "ij lm", 1},  {"hk", "im lj", -1},
    {"hm", "ij lk", -1}, {"hm", "ik lj", 1},  {"lj", "ik hm", 1},  {"lj", "im hk", -1}, {"lk", "ij hm", -1},
    {"lk", "im hj", 1},  {"lm", "ij hk", 1},  {"lm", "ik hj", -1},
};

// (-T_{p q1 q2 p'} + T_{p q2 q1 p'} + S_{p p' q1 q2}/2 + tau/3 R_{p p' q1 q2}) g_G
struct QuadTerm {
  char p1, p2, q1, q2;
  std::string_view g;
  int sign;
};
constexpr QuadTerm kQuadTerms[] = {
    {'i', 'h', 'j', 'k', "lm", 1},  {'i', 'l', 'j', 'k', "hm", -1}, {'i', 'h', 'j', 'm', "lk", -1},
    {'i', 'l', 'j', 'm', "hk", 1},  {'i', 'h', 'k', 'm', "lj", 1},  {'i', 'l', 'k', 'm', "hj", -1},
    {'h', 'l', 'j', 'm', "ik", -1}, {'h', 'l', 'j', 'k', "im", 1},  {'h', 'l', 'k', 'm', "ij", 1},
};

struct ATerm {
  std::string_view labels;
  int sign;
};
constexpr ATerm kATerms[] = {
    {"hjkmil", 1},  {"ljkmih", -1}, {"ijkmhl", -1}, {"ijmkhl", 1}, {"hjmkil", -1},
    {"ljmkih", 1},  {"ikmjhl", -1}, {"hkmjil", 1},  {"lkmjih", -1},
};

// R_q rho_p terms of group 34.
struct RhoTerm {
  std::string_view r;
  std::string_view p;
  int sign;
};
constexpr RhoTerm kRhoTerms[] = {
    {"ilkm", "hj", -1}, {"iljm", "hk", 1}, {"hljk", "im", 1}, {"ihjk", "lm", 1}, {"ihkm", "lj", 1},
    {"ihjm", "lk", -1}, {"iljk", "hm", -1}, {"hlkm", "ij", 1}, {"hljm", "ik", -1},
};

std::string quad(char a, char b, char c, char d) { return {a, b, c, d}; }

void add_quad_term(Assembler& as, const QuadTerm& q, const TSADecomposition& d, const Tensor& r, const Scalar& tau) {
  const Scalar s(q.sign);
  const std::string t1 = quad(q.p1, q.q1, q.q2, q.p2);
  const std::string t2 = quad(q.p1, q.q2, q.q1, q.p2);
  const std::string sr = quad(q.p1, q.p2, q.q1, q.q2);
  as.add(-s, {{&d.T, t1}}, q.g);
  as.add(s, {{&d.T, t2}}, q.g);
  as.add(s * frac(1, 2), {{&d.S, sr}}, q.g);
  as.add(s * tau * frac(1, 3), {{&r, sr}}, q.g);
}

Tensor first_block(int dim, const Scalar& c) {
  Assembler as(dim, kSix);
  for (const Triple& t : kTriples) as.add(c * Scalar(t.sign), {}, t.pairs);
  return as.take();
}

Tensor a_block(int dim, const Tensor& a) {
  Assembler as(dim, kSix);
  for (const ATerm& t : kATerms) as.add(Scalar(t.sign), {{&a, t.labels}});
  return as.take();
}

std::vector<Tensor> quad_terms(int dim, const TSADecomposition& d, const Tensor& r, const Scalar& tau) {
  std::vector<Tensor> out;
  for (const QuadTerm& q : kQuadTerms) {
    Assembler as(dim, kSix);
    add_quad_term(as, q, d, r, tau);
    out.push_back(as.take());
  }
  return out;
}

Tensor sum(const std::vector<Tensor>& parts, int dim, int rank) {
  Tensor acc(dim, rank);
  for (const Tensor& p : parts) acc += p;
  return acc;
}

}  // namespace

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::universal:
      return "universal";
    case Hypothesis::einstein:
      return "einstein";
    case Hypothesis::super_einstein:
      return "super_einstein";
  }
  return "?";
}

ResidualReport make_report(std::string identity, Hypothesis h, bool hypothesis_met, Tensor residual) {
  ResidualReport rep;
  rep.identity = std::move(identity);
  rep.hypothesis = h;
  rep.hypothesis_met = hypothesis_met;
  std::size_t best = residual.size();
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (residual[i].is_zero()) continue;
    if (best == residual.size() || compare_abs(residual[i], residual[best]) > 0) best = i;
  }
  rep.is_zero = best == residual.size();
  if (!rep.is_zero) {
    Witness w;
    w.idx = residual.multi_index(best);
    for (int& v : w.idx) ++v;
    w.val = residual[best];
    rep.witness = std::move(w);
  }
  rep.residual = std::move(residual);
  return rep;
}

Json residual_to_json(const ResidualReport& rep) {
  Json j;
  j["identity"] = rep.identity;
  j["hypothesis"] = to_string(rep.hypothesis);
  j["hypothesis_met"] = rep.hypothesis_met;
  j["is_zero"] = rep.is_zero;
  if (rep.witness) j["witness"] = {{"idx", rep.witness->idx}, {"val", rep.witness->val.str()}};
  return j;
}

TSADecomposition tsa(const CurvatureTensor& curv) {
  const Tensor& r = curv.tensor();
  return {einsum("pabq,rabs->pqrs", {r, r}), einsum("abpq,abrs->pqrs", {r, r}),
          einsum("apqr,astu->pqrstu", {r, r})};
}

Tensor patterson_contraction(const Tensor& op, int order, int r, LeftoverMode mode) {
  if (op.rank() != 4) throw ShapeError("patterson operand must have rank 4");
  if (r < 1 || 2 * r + 1 > order) {
    throw PreconditionError("need 1 <= r and 2r + 1 <= order, got r = " + std::to_string(r) + ", order = " +
                            std::to_string(order));
  }
  DeltaSpec spec(order);
  for (int t = 0; t < r; ++t) {
    spec.lower[2 * t + 1] = AxisRef{t, 0};
    spec.lower[2 * t + 2] = AxisRef{t, 1};
    spec.upper[2 * t + 1] = AxisRef{t, 2};
    spec.upper[2 * t + 2] = AxisRef{t, 3};
  }
  if (mode == LeftoverMode::traced) {
    for (int s = 2 * r + 1; s < order; ++s) spec.traces.emplace_back(s, s);
  } else if (2 * (order - 2 * r) > Tensor::kMaxRank) {
    throw PreconditionError("free residual rank " + std::to_string(2 * (order - 2 * r)) +
                            " exceeds the rank limit; use traced mode");
  }
  const TensorRefs ops(static_cast<std::size_t>(r), std::cref(op));
  return generalized_delta_contract(ops, spec, op.dim());
}

namespace {

ResidualReport patterson_on(const Tensor& op, int m, int copies, LeftoverMode mode, std::string name) {
  if (copies < 1 || copies > m / 2) {
    throw PreconditionError("r must lie in 1.." + std::to_string(m / 2) + " for dimension " + std::to_string(m) +
                            ", got " + std::to_string(copies));
  }
  return make_report(std::move(name), Hypothesis::universal, true, patterson_contraction(op, m + 1, copies, mode));
}

}  // namespace

ResidualReport patterson_residual(const CurvatureTensor& r, int copies, LeftoverMode mode) {
  return patterson_on(r.tensor(), r.dim(), copies, mode, "patterson");
}

ResidualReport weyl_patterson_residual(const CurvatureTensor& r, int copies, LeftoverMode mode) {
  if (copies < 1 || copies > r.dim() / 2) return patterson_on(r.tensor(), r.dim(), copies, mode, "weyl-patterson");
  return patterson_on(weyl(r).tensor(), r.dim(), copies, mode, "weyl-patterson");
}

Tensor weyl_quadratic_rank4(const CurvatureTensor& w) {
  const int m = w.dim();
  const Tensor& wt = w.tensor();
  const TSADecomposition d = tsa(w);
  const Tensor tc = einsum("iabc,jabc->ij", {wt, wt});
  const Scalar norm = einsum("abcd,abcd->", {wt, wt}).value();
  Assembler as(m, "ijkl");
  as.add(norm, {}, "ik jl");
  as.add(-norm, {}, "il jk");
  const Scalar c(-4);
  as.add(c, {{&tc, "jl"}}, "ik");
  as.add(-c, {{&tc, "jk"}}, "il");
  as.add(c, {{&tc, "ik"}}, "jl");
  as.add(-c, {{&tc, "il"}}, "jk");
  as.add(c * Scalar(-2), {{&d.T, "ilkj"}});
  as.add(c * Scalar(2), {{&d.T, "iklj"}});
  as.add(-c, {{&d.S, "ijkl"}});
  return as.take();
}

Tensor WeylSixBlocks::total() const {
  Tensor t = norm;
  t += t_check;
  t += pairs;
  t += squares;
  t += products;
  return t;
}

WeylSixBlocks weyl_quadratic_rank6(const CurvatureTensor& w) {
  const int m = w.dim();
  const Tensor& wt = w.tensor();
  const TSADecomposition d = tsa(w);
  const Tensor tc = einsum("iabc,jabc->ij", {wt, wt});
  const Scalar norm = einsum("abcd,abcd->", {wt, wt}).value();
  WeylSixBlocks b;
  b.norm = first_block(m, norm);

  {
    // The l-rows carry the signs that make the block antisymmetric in (i,h,l).
    struct Row {
      std::string_view xy, pairs;
      int sign;
    };
    static constexpr Row rows[] = {
        {"ij", "hk lm", 1},  {"ik", "hm lj", 1},  {"im", "hj lk", 1},  {"ik", "hj lm", -1}, {"ij", "hm lk", -1},
        {"im", "hk lj", -1}, {"hj", "ik lm", -1}, {"hk", "im lj", -1}, {"hm", "ij lk", -1}, {"hk", "ij lm", 1},
        {"hj", "im lk", 1},  {"hm", "ik lj", 1},  {"lj", "hk im", -1}, {"lk", "hm ij", -1}, {"lm", "hj ik", -1},
        {"lk", "hj im", 1},  {"lj", "hm ik", 1},  {"lm", "hk ij", 1},
    };
    Assembler as(m, kSix);
    for (const Row& row : rows) as.add(Scalar(-4 * row.sign), {{&tc, row.xy}}, row.pairs);
    b.t_check = as.take();
  }
  {
    // (W_pabx W_yabq - W_paby W_xabq) g_G
    struct Pair {
      char p, x, y, q;
      std::string_view g;
      int sign;
    };
    static constexpr Pair rows[] = {
        {'i', 'j', 'k', 'h', "lm", 1},  {'i', 'j', 'm', 'h', "lk", -1}, {'i', 'k', 'm', 'h', "lj", 1},
        {'i', 'j', 'k', 'l', "hm", -1}, {'i', 'j', 'm', 'l', "hk", 1},  {'i', 'k', 'm', 'l', "hj", -1},
        {'h', 'j', 'k', 'l', "im", 1},  {'h', 'j', 'm', 'l', "ik", -1}, {'h', 'k', 'm', 'l', "ij", 1},
    };
    Assembler as(m, kSix);
    for (const Pair& row : rows) {
      const std::string a = quad(row.p, row.x, row.y, row.q);
      const std::string c = quad(row.p, row.y, row.x, row.q);
      as.add(Scalar(-8 * row.sign), {{&d.T, a}}, row.g);
      as.add(Scalar(8 * row.sign), {{&d.T, c}}, row.g);
    }
    b.pairs = as.take();
  }
  {
    struct Sq {
      std::string_view s, g;
      int sign;
    };
    static constexpr Sq rows[] = {
        {"ihjk", "lm", 1}, {"ihjm", "lk", -1}, {"ihkm", "lj", 1}, {"iljk", "hm", -1}, {"iljm", "hk", 1},
        {"ilkm", "hj", -1}, {"hljk", "im", 1}, {"hljm", "ik", -1}, {"hlkm", "ij", 1},
    };
    Assembler as(m, kSix);
    for (const Sq& row : rows) as.add(Scalar(4 * row.sign), {{&d.S, row.s}}, row.g);
    b.squares = as.take();
  }
  {
    static constexpr ATerm rows[] = {
        {"hjkmil", 1}, {"ljkmih", -1}, {"jhlikm", -1}, {"ijkmhl", -1}, {"jihlmk", 1},
        {"jilhkm", 1}, {"hjmkil", -1}, {"ljmkih", 1},  {"ijmkhl", 1},
    };
    Assembler as(m, kSix);
    for (const ATerm& row : rows) as.add(Scalar(8 * row.sign), {{&d.A, row.labels}});
    b.products = as.take();
  }
  return b;
}

Tensor weyl_patterson_expansion(const CurvatureTensor& r) {
  const CurvatureTensor w = weyl(r);
  if (r.dim() == 5) return weyl_quadratic_rank4(w) * Scalar(4);
  if (r.dim() == 6) return weyl_quadratic_rank6(w).total().transposed({0, 1, 4, 2, 3, 5}) * Scalar(4);
  throw PreconditionError("term-by-term expansion exists for dimensions 5 and 6 only");
}

// ---- dimension 5 ---------------------------------------------------------

namespace {

struct Five {
  InvariantReport inv;
  TSADecomposition d;
};

Five five(const CurvatureTensor& r, const char* name) {
  require_dim(r, 5, name);
  return {invariants(r), tsa(r)};
}

// The five terms of the Einstein rank-4 identity.
std::vector<Tensor> lemma5_terms(const CurvatureTensor& r, const Five& f) {
  const Tensor& rt = r.tensor();
  const Scalar& tau = f.inv.tau;
  const Tensor& tc = f.inv.t_check;
  std::vector<Tensor> out;
  {
    Assembler as(5, "ijkl");
    const Scalar c = f.inv.R_norm_sq + tau * tau * frac(1, 5);
    as.add(c, {}, "ik jl");
    as.add(-c, {}, "il jk");
    out.push_back(as.take());
  }
  {
    Assembler as(5, "ijkl");
    as.add(Scalar(-4), {{&tc, "ik"}}, "jl");
    as.add(Scalar(-4), {{&tc, "jl"}}, "ik");
    as.add(Scalar(4), {{&tc, "il"}}, "jk");
    as.add(Scalar(4), {{&tc, "jk"}}, "il");
    out.push_back(as.take());
  }
  {
    Assembler as(5, "ijkl");
    as.add(Scalar(8), {{&f.d.T, "ilkj"}});
    as.add(Scalar(-8), {{&f.d.T, "iklj"}});
    out.push_back(as.take());
  }
  out.push_back(f.d.S * Scalar(4));
  out.push_back(rt * (tau * frac(12, 5)));
  return out;
}

}  // namespace

ResidualReport lemma5_einstein_residual(const CurvatureTensor& r) {
  const Five f = five(r, "lemma5");
  return make_report("lemma5", Hypothesis::einstein, f.inv.einstein, sum(lemma5_terms(r, f), 5, 4));
}

Tensor lemma5_transvection(const CurvatureTensor& r) {
  return transvect5(lemma5_einstein_residual(r).residual, r.tensor());
}

std::vector<SideBySide> lemma5_transvection_steps(const CurvatureTensor& r) {
  const Five f = five(r, "lemma5");
  const std::vector<Tensor> terms = lemma5_terms(r, f);
  const InvariantReport& v = f.inv;
  const Scalar& tau = v.tau;
  std::vector<SideBySide> out;
  auto step = [&](const char* label, std::size_t n, Tensor rhs) {
    out.push_back({label, transvect5(terms[n], r.tensor()), std::move(rhs)});
  };
  step("metric term", 0, metric_times(5, frac(-2, 5) * tau * (v.R_norm_sq + tau * tau * frac(1, 5))));
  step("Tc term", 1, (v.t_check * (frac(-2, 5) * tau) + v.r_check * Scalar(-2)) * Scalar(-4));
  step("T term", 2, v.r_ring2 * Scalar(-16) + v.r_hat2 * Scalar(4));
  step("S term", 3, v.r_hat2 * Scalar(4));
  step("R term", 4, v.t_check * (tau * frac(12, 5)));
  return out;
}

ResidualReport thmA_einstein_residual(const CurvatureTensor& r) {
  require_dim(r, 5, "thmA-a");
  const InvariantReport v = invariants(r);
  const Scalar& tau = v.tau;
  Tensor res = v.t_check * (Scalar(2) * tau);
  res.add_scaled(v.r_check, Scalar(4));
  res.add_scaled(v.r_hat2, Scalar(4));
  res.add_scaled(v.r_ring2, Scalar(-8));
  res -= metric_times(5, tau * v.R_norm_sq * frac(1, 5) + tau * tau * tau * frac(1, 25));
  return make_report("thmA-a", Hypothesis::einstein, v.einstein, std::move(res));
}

namespace {

std::vector<Tensor> pa5_terms(const CurvatureTensor& r, const Five& f) {
  const Scalar& tau = f.inv.tau;
  std::vector<Tensor> out;
  out.push_back(f.d.S);
  {
    Assembler as(5, "ijkl");
    as.add(Scalar(2), {{&f.d.T, "ilkj"}});
    out.push_back(as.take());
  }
  {
    Assembler as(5, "ijkl");
    as.add(Scalar(-2), {{&f.d.T, "iklj"}});
    out.push_back(as.take());
  }
  out.push_back(r.tensor() * (tau * frac(3, 5)));
  {
    Assembler as(5, "ijkl");
    as.add(Scalar(1), {}, "ik jl");
    as.add(Scalar(-1), {}, "il jk");
    out.push_back(as.take());
  }
  return out;
}

}  // namespace

ResidualReport pa5_residual(const CurvatureTensor& r) {
  const Five f = five(r, "pa5");
  const std::vector<Tensor> terms = pa5_terms(r, f);
  const Scalar& tau = f.inv.tau;
  Tensor res = terms[0] + terms[1] + terms[2] + terms[3];
  res.add_scaled(terms[4], -(f.inv.R_norm_sq * frac(3, 20) - tau * tau * frac(1, 20)));
  return make_report("pa5", Hypothesis::super_einstein, f.inv.super_einstein, std::move(res));
}

std::array<Scalar, 4> pa5_blocks(const CurvatureTensor& r, int i, int j, int k, int l) {
  const Five f = five(r, "pa5");
  const std::vector<Tensor> terms = pa5_terms(r, f);
  return {terms[0].at({i, j, k, l}), terms[1].at({i, j, k, l}), terms[2].at({i, j, k, l}), terms[3].at({i, j, k, l})};
}

std::vector<SideBySide> pa5_transvection_steps(const CurvatureTensor& r) {
  const Five f = five(r, "pa5");
  const std::vector<Tensor> terms = pa5_terms(r, f);
  const InvariantReport& v = f.inv;
  const Tensor ring_minus = (v.r_ring2 - v.r_hat2 * frac(1, 4)) * Scalar(-2);
  std::vector<SideBySide> out;
  auto step = [&](const char* label, std::size_t n, Tensor rhs) {
    out.push_back({label, transvect5(terms[n], r.tensor()), std::move(rhs)});
  };
  step("S term", 0, v.r_hat2);
  step("first T term", 1, ring_minus);
  step("second T term", 2, ring_minus);
  step("R term", 3, metric_times(5, frac(3, 25) * v.tau * v.R_norm_sq));
  step("metric term", 4, metric_times(5, frac(-2, 5) * v.tau));
  return out;
}

ResidualReport thmA_super_residual(const CurvatureTensor& r) {
  require_dim(r, 5, "thmA-b");
  const InvariantReport v = invariants(r);
  const Scalar& tau = v.tau;
  Tensor res = v.r_ring2 * Scalar(4);
  res.add_scaled(v.r_hat2, Scalar(-2));
  res -= metric_times(5, frac(9, 50) * tau * v.R_norm_sq - tau * tau * tau * frac(1, 50));
  return make_report("thmA-b", Hypothesis::super_einstein, v.super_einstein, std::move(res));
}

// ---- dimension 6 ---------------------------------------------------------

Tensor Lemma6Blocks::total() const {
  Tensor t = first;
  for (const Tensor& x : second) t += x;
  for (const Tensor& x : third) t += x;
  t += fourth;
  return t;
}

namespace {

struct Six {
  InvariantReport inv;
  TSADecomposition d;
};

Six six(const CurvatureTensor& r, const char* name) {
  require_dim(r, 6, name);
  return {invariants(r), tsa(r)};
}

Lemma6Blocks lemma6_blocks_of(const CurvatureTensor& r, const Six& s) {
  const Scalar& tau = s.inv.tau;
  Lemma6Blocks b;
  b.first = first_block(6, (s.inv.R_norm_sq + tau * tau * frac(1, 3)) * frac(1, 8));
  for (std::size_t n = 0; n < std::size(kPairTerms); n += 2) {
    Assembler as(6, kSix);
    for (std::size_t t = n; t < n + 2; ++t) {
      as.add(frac(-kPairTerms[t].sign, 2), {{&s.inv.t_check, kPairTerms[t].xy}}, kPairTerms[t].pairs);
    }
    b.second.push_back(as.take());
  }
  b.third = quad_terms(6, s.d, r.tensor(), tau);
  b.fourth = a_block(6, s.d.A);
  return b;
}

}  // namespace

Lemma6Blocks lemma6_blocks(const CurvatureTensor& r) { return lemma6_blocks_of(r, six(r, "lemma6")); }

ResidualReport lemma6_einstein_residual(const CurvatureTensor& r) {
  const Six s = six(r, "lemma6");
  return make_report("lemma6", Hypothesis::einstein, s.inv.einstein, lemma6_blocks_of(r, s).total());
}

std::vector<SideBySide> lemma6_groups(const CurvatureTensor& curv) {
  const Six s = six(curv, "appendix34");
  const Tensor& r = curv.tensor();
  const InvariantReport& v = s.inv;
  const Scalar& tau = v.tau;
  const Tensor& rho = v.ricci;
  const Tensor& tc = v.t_check;
  const Tensor g = Tensor::metric(6);
  const Scalar tau2 = tau * tau;
  std::vector<SideBySide> out;
  int number = 0;
  auto label = [&number] { return "group " + std::to_string(++number); };

  for (const Triple& t : kTriples) {
    const Scalar sg(t.sign);
    Assembler lhs(6, kSix), rhs(6, kSix);
    lhs.add(sg * (v.R_norm_sq - Scalar(4) * v.ricci_norm_sq + tau2), {}, t.pairs);
    rhs.add(sg * (v.R_norm_sq + tau2 * frac(1, 3)), {}, t.pairs);
    out.push_back({label(), lhs.take(), rhs.take()});
  }

  const Tensor rho_rho = einsum("xa,ya->xy", {rho, rho});
  const Tensor r_rho = einsum("xaby,ab->xy", {r, rho});
  Tensor inner = tc * Scalar(-4);
  inner.add_scaled(rho_rho, Scalar(8));
  inner.add_scaled(r_rho, Scalar(8));
  inner.add_scaled(rho, Scalar(-4) * tau);
  for (const PairTerm& t : kPairTerms) {
    const Scalar sg(t.sign);
    Assembler lhs(6, kSix), rhs(6, kSix);
    lhs.add(sg, {{&inner, t.xy}}, t.pairs);
    rhs.add(Scalar(-4) * sg, {{&tc, t.xy}}, t.pairs);
    rhs.add(frac(-2, 9) * tau2 * sg, {{&g, t.xy}}, t.pairs);
    out.push_back({label(), lhs.take(), rhs.take()});
  }

  // U_pqrs = R_xpqr rho_xs
  const Tensor u = einsum("xpqr,xs->pqrs", {r, rho});
  for (const QuadTerm& q : kQuadTerms) {
    const Scalar sg(q.sign);
    const char a = q.p1, b = q.p2, c = q.q1, d = q.q2;
    Assembler lhs(6, kSix), rhs(6, kSix);
    for (Assembler* as : {&lhs, &rhs}) {
      as->add(Scalar(-8) * sg, {{&s.d.T, quad(a, c, d, b)}}, q.g);
      as->add(Scalar(8) * sg, {{&s.d.T, quad(a, d, c, b)}}, q.g);
      as->add(Scalar(4) * sg, {{&s.d.S, quad(a, b, c, d)}}, q.g);
    }
    lhs.add(Scalar(-8) * sg, {{&u, quad(a, c, d, b)}}, q.g);
    lhs.add(Scalar(8) * sg, {{&u, quad(d, a, b, c)}}, q.g);
    lhs.add(Scalar(-8) * sg, {{&u, quad(c, a, b, d)}}, q.g);
    lhs.add(Scalar(8) * sg, {{&u, quad(b, c, d, a)}}, q.g);
    const std::string ac{a, c}, bd{b, d}, ad{a, d}, bc{b, c};
    lhs.add(Scalar(8) * sg, {{&rho, ac}, {&rho, bd}}, q.g);
    lhs.add(Scalar(-8) * sg, {{&rho, ad}, {&rho, bc}}, q.g);
    lhs.add(Scalar(-4) * tau * sg, {{&r, quad(a, b, c, d)}}, q.g);
    rhs.add(frac(4, 3) * tau * sg, {{&r, quad(a, b, c, d)}}, q.g);
    const std::string gac_bd = ac + bd + std::string(q.g);
    const std::string gad_bc = ad + bc + std::string(q.g);
    rhs.add(frac(2, 9) * tau2 * sg, {}, gac_bd);
    rhs.add(frac(-2, 9) * tau2 * sg, {}, gad_bc);
    out.push_back({label(), lhs.take(), rhs.take()});
  }

  {
    Assembler lhs(6, kSix), rhs(6, kSix);
    for (const ATerm& t : kATerms) {
      lhs.add(Scalar(8 * t.sign), {{&s.d.A, t.labels}});
      rhs.add(Scalar(8 * t.sign), {{&s.d.A, t.labels}});
    }
    for (const RhoTerm& t : kRhoTerms) {
      lhs.add(Scalar(8 * t.sign), {{&r, t.r}, {&rho, t.p}});
      rhs.add(frac(4, 3) * tau * Scalar(t.sign), {{&r, t.r}}, t.p);
    }
    out.push_back({label(), lhs.take(), rhs.take()});
  }
  return out;
}

Tensor lemma6_transvection(const CurvatureTensor& r) {
  return transvect6(lemma6_einstein_residual(r).residual, r.tensor());
}

std::vector<SideBySide> lemma6_transvection_steps(const CurvatureTensor& r) {
  const Six s = six(r, "lemma6");
  const Lemma6Blocks b = lemma6_blocks_of(r, s);
  const InvariantReport& v = s.inv;
  const Scalar& tau = v.tau;
  const Scalar& norm = v.R_norm_sq;
  const Tensor& rt = r.tensor();
  std::vector<SideBySide> out;
  auto step = [&](std::string label, const Tensor& x, Tensor rhs) {
    out.push_back({std::move(label), transvect6(x, rt), std::move(rhs)});
  };

  step("first block", b.first, metric_times(6, frac(-1, 6) * (tau * norm + tau * tau * tau * frac(1, 3))));

  const Tensor a1 = metric_times(6, tau * norm * frac(1, 12)) - v.r_check * frac(1, 2);
  const Tensor b1 = v.t_check * (tau * frac(-1, 6));
  const Tensor c1 = v.t_check * tau;
  const Tensor* second_rhs[] = {&a1, &a1, &b1, &a1, &a1, &b1, &b1, &b1, &c1};
  for (std::size_t n = 0; n < b.second.size(); ++n) {
    step("second block term " + std::to_string(n + 1), b.second[n], *second_rhs[n]);
  }
  step("second block", sum(b.second, 6, 6),
       metric_times(6, tau * norm * frac(1, 3)) - v.r_check * Scalar(2) + v.t_check * (tau * frac(1, 3)));

  const Tensor f = metric_times(6, Scalar(-2) * v.r_ring0 + v.r_hat0 + tau * norm * frac(1, 3));
  const Tensor p = v.r_ring2 * Scalar(2) - v.r_hat2 - v.t_check * (tau * frac(1, 3));
  const Tensor q = metric_times(6, tau * tau * tau * frac(1, 72)) - v.t_check * (tau * frac(1, 4));
  const Tensor* third_rhs[] = {&f, &p, &p, &q, &p, &q, &q, &p, &q};
  for (std::size_t n = 0; n < b.third.size(); ++n) {
    step("third block term " + std::to_string(n + 1), b.third[n], *third_rhs[n]);
  }
  step("third block", sum(b.third, 6, 6),
       metric_times(6, Scalar(-2) * v.r_ring0 + v.r_hat0 + tau * norm * frac(1, 3) + tau * tau * tau * frac(1, 18)) +
           v.r_ring2 * Scalar(8) - v.r_hat2 * Scalar(4) - v.t_check * (tau * frac(7, 3)));

  step("A block", b.fourth, v.r_check * Scalar(-4) - v.r_hat2 * Scalar(2) + v.r_ring2 * Scalar(4));
  return out;
}

ResidualReport thmB_einstein_residual(const CurvatureTensor& r) {
  require_dim(r, 6, "thmB-a");
  const InvariantReport v = invariants(r);
  const Scalar& tau = v.tau;
  Tensor res = v.t_check * (Scalar(4) * tau);
  res.add_scaled(v.r_check, Scalar(12));
  res.add_scaled(v.r_hat2, Scalar(12));
  res.add_scaled(v.r_ring2, Scalar(-24));
  res -= metric_times(6, tau * v.R_norm_sq - Scalar(4) * v.r_ring0 + Scalar(2) * v.r_hat0);
  return make_report("thmB-a", Hypothesis::einstein, v.einstein, std::move(res));
}

ResidualReport thmB_einstein_residual_rearranged(const CurvatureTensor& r) {
  require_dim(r, 6, "thmB-a");
  const InvariantReport v = invariants(r);
  const Scalar& tau = v.tau;
  Tensor res = metric_times(6, -tau * v.R_norm_sq + Scalar(4) * v.r_ring0 - Scalar(2) * v.r_hat0);
  res.add_scaled(v.r_check, Scalar(12));
  res.add_scaled(v.r_hat2, Scalar(12));
  res.add_scaled(v.r_ring2, Scalar(-24));
  res.add_scaled(v.t_check, Scalar(4) * tau);
  return make_report("thmB-a rearranged", Hypothesis::einstein, v.einstein, std::move(res));
}

ResidualReport super6_intermediate_residual(const CurvatureTensor& r) {
  const Six s = six(r, "eq42");
  const Scalar& tau = s.inv.tau;
  Tensor res = first_block(6, -(s.inv.R_norm_sq - tau * tau * frac(1, 3)) * frac(1, 8));
  for (const Tensor& t : quad_terms(6, s.d, r.tensor(), tau)) res += t;
  res += a_block(6, s.d.A);
  return make_report("eq42", Hypothesis::super_einstein, s.inv.super_einstein, std::move(res));
}

ResidualReport thmB_super_residual(const CurvatureTensor& r) {
  require_dim(r, 6, "thmB-b");
  const InvariantReport v = invariants(r);
  Tensor res = v.r_ring2 * Scalar(2) - v.r_hat2;
  res -= metric_times(6, (Scalar(2) * v.r_ring0 - v.r_hat0) * frac(1, 6));
  return make_report("thmB-b", Hypothesis::super_einstein, v.super_einstein, std::move(res));
}

Scalar gauss_bonnet_integrand_6(const CurvatureTensor& curv) {
  require_dim(curv, 6, "gauss-bonnet integrand");
  const Tensor& r = curv.tensor();
  const InvariantReport v = invariants(curv);
  const Tensor& rho = v.ricci;
  const Scalar& tau = v.tau;
  Scalar b = tau * tau * tau;
  b -= Scalar(12) * tau * v.ricci_norm_sq;
  b += Scalar(3) * tau * v.R_norm_sq;
  b += Scalar(16) * einsum("ab,ac,bc->", {rho, rho, rho}).value();
  b -= Scalar(24) * einsum("ab,cd,acbd->", {rho, rho, r}).value();
  b -= Scalar(24) * einsum("uv,abcu,abcv->", {rho, r, r}).value();
  b += Scalar(8) * einsum("abcd,aucv,bvdu->", {r, r, r}).value();
  b -= Scalar(2) * v.r_hat0;
  return b;
}

}  // namespace curvident
