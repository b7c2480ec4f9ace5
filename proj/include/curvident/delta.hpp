#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "curvident/tensor.hpp"

namespace curvident {

/// Contraction of a generalized Kronecker delta of order N against operands.
///
/// The delta has N lower slots i_1..i_N and N upper slots j_1..j_N. Each
/// slot is either attached to one operand axis, traced against a slot of the
/// other kind, or left free. Free slots form the output: free lower slots in
/// ascending order, then free upper slots in ascending order. Every operand
/// axis must be attached to exactly one slot.
struct DeltaSpec {
  int order = 0;
  std::vector<std::optional<AxisRef>> lower;
  std::vector<std::optional<AxisRef>> upper;
  /// (lower slot, upper slot) pairs summed against each other.
  std::vector<std::pair<int, int>> traces;

  explicit DeltaSpec(int n = 0) : order(n), lower(n), upper(n) {}
};

/// Evaluates the delta (the N x N determinant of ordinary deltas) contracted
/// against `operands` by expanding over the N! permutations. Permutation
/// terms whose contraction networks coincide under the detected operand
/// symmetries are merged before any arithmetic happens.
Tensor generalized_delta_contract(const TensorRefs& operands, const DeltaSpec& spec, int dim);

/// Number of cached expansion plans (for tests and diagnostics).
std::size_t delta_plan_cache_size();

}  // namespace curvident
