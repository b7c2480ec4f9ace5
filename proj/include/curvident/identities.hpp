#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "curvident/curvature.hpp"
#include "curvident/json_io.hpp"

namespace curvident {

enum class Hypothesis { universal, einstein, super_einstein };

std::string to_string(Hypothesis h);

/// How the delta slots not attached to a curvature operand are treated.
enum class LeftoverMode { free, traced };

struct Witness {
  std::vector<int> idx;  // 1-based
  Scalar val;
};

struct ResidualReport {
  std::string identity;
  Hypothesis hypothesis = Hypothesis::universal;
  /// Whether the input satisfies `hypothesis`. Evaluation happens either way.
  bool hypothesis_met = true;
  Tensor residual;
  bool is_zero = true;
  /// Largest component in absolute value (first one on ties). Set iff nonzero.
  std::optional<Witness> witness;
};

ResidualReport make_report(std::string identity, Hypothesis h, bool hypothesis_met, Tensor residual);

Json residual_to_json(const ResidualReport& rep);

/// Both sides of one equality.
struct SideBySide {
  std::string label;
  Tensor lhs;
  Tensor rhs;
  bool holds() const { return tensors_equal(lhs, rhs); }
};

struct TSADecomposition {
  Tensor T;  // T_pqrs = R_pabq R_rabs
  Tensor S;  // S_pqrs = R_abpq R_abrs
  Tensor A;  // A_pqrstu = R_apqr R_astu
};

TSADecomposition tsa(const CurvatureTensor& r);

// ---- generalized delta ---------------------------------------------------

/// delta^{j j_1 .. j_{n-1}}_{i i_1 .. i_{n-1}} R^{i_1 i_2}_{j_1 j_2} ... with r
/// copies of `op` on slots 1..2r. Output axes: free lower slots, then free
/// upper slots, each ascending. Traced mode sums slot s against slot s for
/// s > 2r, leaving rank 2.
Tensor patterson_contraction(const Tensor& op, int order, int r, LeftoverMode mode);

/// Order dim+1 with r copies of R. Requires 1 <= r <= dim/2 and, in free
/// mode, an output rank of at most 8.
ResidualReport patterson_residual(const CurvatureTensor& r, int copies, LeftoverMode mode = LeftoverMode::free);

/// patterson_residual on weyl(R).
ResidualReport weyl_patterson_residual(const CurvatureTensor& r, int copies,
                                       LeftoverMode mode = LeftoverMode::free);

/// ||W||^2 (g_ik g_jl - g_il g_jk) - 4{ Wc_jl g_ik - Wc_jk g_il + Wc_ik g_jl
///   - Wc_il g_jk - 2 W_iabl W_kabj + 2 W_iabk W_labj - W_abij W_abkl },
/// axes (i,j,k,l), Wc_ij = W_iabc W_jabc. Any dim; W must be traceless.
Tensor weyl_quadratic_rank4(const CurvatureTensor& w);

/// The rank-6 quadratic Weyl expression, axes (i,h,j,k,l,m), by block.
/// Each block already carries its coefficient (1, -4, -8, +4, +8).
struct WeylSixBlocks {
  Tensor norm;
  Tensor t_check;
  Tensor pairs;
  Tensor squares;
  Tensor products;
  Tensor total() const;
};

WeylSixBlocks weyl_quadratic_rank6(const CurvatureTensor& w);

/// Term-by-term expansion of weyl_patterson_residual(R, 2) for dim 5 and 6,
/// laid out in delta output order. Equals the delta-engine result.
Tensor weyl_patterson_expansion(const CurvatureTensor& r);

// ---- dimension 5 ---------------------------------------------------------

ResidualReport lemma5_einstein_residual(const CurvatureTensor& r);
/// Residual of lemma5 transvected with R_pjkl, axes (i,p).
Tensor lemma5_transvection(const CurvatureTensor& r);
/// The five termwise transvections (Einstein input).
std::vector<SideBySide> lemma5_transvection_steps(const CurvatureTensor& r);

ResidualReport thmA_einstein_residual(const CurvatureTensor& r);
ResidualReport pa5_residual(const CurvatureTensor& r);
/// R_ijab R_abkl, 2 R_iabl R_kabj, -2 R_iabk R_labj, (3/5) tau R_ijkl at one
/// 0-based index tuple.
std::array<Scalar, 4> pa5_blocks(const CurvatureTensor& r, int i, int j, int k, int l);
/// The five termwise transvections (super-Einstein input).
std::vector<SideBySide> pa5_transvection_steps(const CurvatureTensor& r);
ResidualReport thmA_super_residual(const CurvatureTensor& r);

// ---- dimension 6 ---------------------------------------------------------

/// The four blocks of the rank-6 Einstein identity, axes (i,h,j,k,l,m),
/// with each term of the second and third blocks kept separately.
struct Lemma6Blocks {
  Tensor first;
  std::vector<Tensor> second;  // nine Tc-pairs, in display order
  std::vector<Tensor> third;   // nine T/S/R terms with their g factor and sign
  Tensor fourth;               // the nine A-terms
  Tensor total() const;
};

Lemma6Blocks lemma6_blocks(const CurvatureTensor& r);
ResidualReport lemma6_einstein_residual(const CurvatureTensor& r);

/// The 34 expansion groups, both sides kept apart. Group 34 uses
/// coefficient 8 on every A-term.
std::vector<SideBySide> lemma6_groups(const CurvatureTensor& r);

/// Residual of lemma6 transvected with R_ihjk, axes (l,m).
Tensor lemma6_transvection(const CurvatureTensor& r);
/// Termwise transvections: first block, nine second-block pairs, the
/// second-block total, nine third-block terms, the third-block total and the
/// A-block (Einstein input).
std::vector<SideBySide> lemma6_transvection_steps(const CurvatureTensor& r);

ResidualReport thmB_einstein_residual(const CurvatureTensor& r);
/// Same identity arranged as (-tau ||R||^2 + 4 R0 - 2 Rh0) g + 12 Rc + ...
ResidualReport thmB_einstein_residual_rearranged(const CurvatureTensor& r);
ResidualReport super6_intermediate_residual(const CurvatureTensor& r);
ResidualReport thmB_super_residual(const CurvatureTensor& r);

/// The bracket of the six-dimensional Gauss-Bonnet integrand.
Scalar gauss_bonnet_integrand_6(const CurvatureTensor& r);

}  // namespace curvident
