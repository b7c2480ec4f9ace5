#include "curvident/tensor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <string>

#include "curvident/error.hpp"

namespace curvident {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw ShapeError("tensor dimension " + std::to_string(dim) + " outside 2..6");
  }
  if (rank < 0 || rank > kMaxRank) {
    throw ShapeError("tensor rank " + std::to_string(rank) + " outside 0..8");
  }
  data_.resize(ipow(static_cast<std::size_t>(dim), rank));
}

Tensor Tensor::scalar(int dim, Scalar value) {
  Tensor t(dim, 0);
  t.data_[0] = std::move(value);
  return t;
}

Tensor Tensor::metric(int dim) {
  Tensor g(dim, 2);
  for (int i = 0; i < dim; ++i) g.at({i, i}) = Scalar(1);
  return g;
}

std::size_t Tensor::offset(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank_) {
    throw ShapeError("expected " + std::to_string(rank_) + " indices, got " + std::to_string(idx.size()));
  }
  std::size_t off = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw ShapeError("index " + std::to_string(i) + " out of range");
    off = off * dim_ + static_cast<std::size_t>(i);
  }
  return off;
}

std::vector<int> Tensor::multi_index(std::size_t linear) const {
  std::vector<int> idx(rank_);
  for (int k = rank_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(linear % dim_);
    linear /= dim_;
  }
  return idx;
}

const Scalar& Tensor::value() const {
  if (rank_ != 0) throw ShapeError("value() requires a rank-0 tensor");
  return data_[0];
}

bool Tensor::is_zero() const { return first_nonzero() == data_.size(); }

std::size_t Tensor::first_nonzero() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!data_[i].is_zero()) return i;
  }
  return data_.size();
}

Tensor Tensor::transposed(std::span<const int> axes) const {
  if (static_cast<int>(axes.size()) != rank_) throw ShapeError("transpose axis count mismatch");
  std::vector<bool> seen(rank_, false);
  for (int a : axes) {
    if (a < 0 || a >= rank_ || seen[a]) throw ShapeError("transpose axes are not a permutation");
    seen[a] = true;
  }
  Tensor out(dim_, rank_);
  // Stride in the source for each output axis.
  std::vector<std::size_t> src_stride(rank_);
  for (int k = 0; k < rank_; ++k) src_stride[k] = ipow(dim_, rank_ - 1 - axes[k]);
  std::vector<int> idx(rank_, 0);
  std::size_t src = 0;
  for (std::size_t lin = 0; lin < out.data_.size(); ++lin) {
    out.data_[lin] = data_[src];
    for (int k = rank_ - 1; k >= 0; --k) {
      if (++idx[k] < dim_) {
        src += src_stride[k];
        break;
      }
      idx[k] = 0;
      src -= src_stride[k] * (dim_ - 1);
    }
  }
  return out;
}

void Tensor::check_same_shape(const Tensor& other, const char* what) const {
  if (dim_ != other.dim_ || rank_ != other.rank_) {
    throw ShapeError(std::string(what) + ": shape mismatch (dim " + std::to_string(dim_) + " rank " +
                     std::to_string(rank_) + " vs dim " + std::to_string(other.dim_) + " rank " +
                     std::to_string(other.rank_) + ")");
  }
}

Tensor& Tensor::operator+=(const Tensor& other) {
  check_same_shape(other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!other.data_[i].is_zero()) data_[i] += other.data_[i];
  }
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  check_same_shape(other, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!other.data_[i].is_zero()) data_[i] -= other.data_[i];
  }
  return *this;
}

Tensor& Tensor::operator*=(const Scalar& factor) {
  for (auto& v : data_) {
    if (!v.is_zero()) v *= factor;
  }
  return *this;
}

Tensor& Tensor::add_scaled(const Tensor& other, const Scalar& factor) {
  check_same_shape(other, "add_scaled");
  if (factor.is_zero()) return *this;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!other.data_[i].is_zero()) data_[i].add_product(factor, other.data_[i]);
  }
  return *this;
}

Tensor Tensor::operator-() const {
  Tensor out(*this);
  for (auto& v : out.data_) {
    if (!v.is_zero()) v = -v;
  }
  return out;
}

bool tensors_equal(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) {
    throw ShapeError("tensors_equal: shape mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

bool is_zero(const Tensor& t) { return t.is_zero(); }

Tensor tensor_product(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim()) throw ShapeError("tensor_product: dimension mismatch");
  Tensor out(a.dim(), a.rank() + b.rank());
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < nb; ++j) {
      if (!b[j].is_zero()) out[i * nb + j] = a[i] * b[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contraction

ContractionSpec ContractionSpec::parse(std::string_view expr) {
  const auto arrow = expr.find("->");
  if (arrow == std::string_view::npos) throw SpecError("index expression lacks '->': " + std::string(expr));
  const std::string_view lhs = expr.substr(0, arrow);
  const std::string_view rhs = expr.substr(arrow + 2);

  std::map<char, std::vector<AxisRef>> seen;
  int operand = 0;
  int axis = 0;
  for (char c : lhs) {
    if (c == ',') {
      ++operand;
      axis = 0;
      continue;
    }
    if (c == ' ') continue;
    seen[c].push_back({operand, axis++});
  }

  ContractionSpec spec;
  std::map<char, bool> in_output;
  for (char c : rhs) {
    if (c == ' ') continue;
    auto it = seen.find(c);
    if (it == seen.end() || it->second.size() != 1) {
      throw SpecError(std::string("output label '") + c + "' must appear exactly once on the left");
    }
    if (in_output[c]) throw SpecError(std::string("output label '") + c + "' repeated");
    in_output[c] = true;
    spec.free.push_back(it->second.front());
  }
  for (const auto& [label, refs] : seen) {
    if (refs.size() == 2) {
      if (in_output.count(label)) throw SpecError(std::string("summed label '") + label + "' in output");
      spec.bound.emplace_back(refs[0], refs[1]);
    } else if (refs.size() == 1) {
      if (!in_output.count(label)) throw SpecError(std::string("label '") + label + "' neither summed nor output");
    } else {
      throw SpecError(std::string("label '") + label + "' appears more than twice");
    }
  }
  return spec;
}

namespace {

/// Operand with one integer label per axis. Labels shared between factors
/// are summed when the factors are merged; output labels are >= 0 and
/// dummy labels are negative.
struct Factor {
  std::shared_ptr<const Tensor> owned;
  const Tensor* tensor = nullptr;
  std::vector<int> labels;
};

Factor make_owned(Tensor t, std::vector<int> labels) {
  Factor f;
  f.owned = std::make_shared<const Tensor>(std::move(t));
  f.tensor = f.owned.get();
  f.labels = std::move(labels);
  return f;
}

/// Sums over repeated labels within a single factor.
Factor reduce_self_traces(const Factor& in) {
  std::vector<int> unique;
  std::vector<int> pos_of(in.labels.size());
  for (std::size_t k = 0; k < in.labels.size(); ++k) {
    auto it = std::find(unique.begin(), unique.end(), in.labels[k]);
    if (it == unique.end()) {
      pos_of[k] = static_cast<int>(unique.size());
      unique.push_back(in.labels[k]);
    } else {
      pos_of[k] = static_cast<int>(it - unique.begin());
    }
  }
  if (unique.size() == in.labels.size()) return in;

  // Repeated labels that appear twice here are fully summed; none survive.
  std::vector<int> kept;
  for (int l : unique) {
    if (std::count(in.labels.begin(), in.labels.end(), l) == 1) kept.push_back(l);
  }
  const Tensor& src = *in.tensor;
  const int dim = src.dim();
  Tensor out(dim, static_cast<int>(kept.size()));
  std::vector<int> vals(unique.size());
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    if (src[lin].is_zero()) continue;
    const std::vector<int> idx = src.multi_index(lin);
    std::fill(vals.begin(), vals.end(), -1);
    bool diag = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      int& v = vals[pos_of[k]];
      if (v == -1) {
        v = idx[k];
      } else if (v != idx[k]) {
        diag = false;
        break;
      }
    }
    if (!diag) continue;
    std::size_t off = 0;
    for (int l : kept) {
      const auto p = std::find(unique.begin(), unique.end(), l) - unique.begin();
      off = off * dim + vals[p];
    }
    out[off] += src[lin];
  }
  return make_owned(std::move(out), kept);
}

/// Contracts two factors over their shared labels.
Factor contract_pair(const Factor& a, const Factor& b) {
  const Tensor& ta = *a.tensor;
  const Tensor& tb = *b.tensor;
  const int dim = ta.dim();

  std::vector<int> out_labels;
  for (int l : a.labels) {
    if (std::find(b.labels.begin(), b.labels.end(), l) == b.labels.end()) out_labels.push_back(l);
  }
  std::vector<int> rest;  // labels only in b
  for (int l : b.labels) {
    if (std::find(a.labels.begin(), a.labels.end(), l) == a.labels.end()) {
      out_labels.push_back(l);
      rest.push_back(l);
    }
  }
  Tensor out(dim, static_cast<int>(out_labels.size()));

  auto stride_in = [dim](const std::vector<int>& labels, int label) -> std::size_t {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return 0;
    return ipow(dim, static_cast<int>(labels.end() - it) - 1);
  };

  // Strides of each a-axis into b and into the output.
  std::vector<std::size_t> a_to_b(a.labels.size()), a_to_out(a.labels.size());
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    a_to_b[k] = stride_in(b.labels, a.labels[k]);
    a_to_out[k] = stride_in(out_labels, a.labels[k]);
  }
  // Offsets for every assignment of the labels only present in b.
  const std::size_t n_rest = ipow(dim, static_cast<int>(rest.size()));
  std::vector<std::size_t> rest_b(n_rest), rest_out(n_rest);
  {
    std::vector<std::size_t> sb(rest.size()), so(rest.size());
    for (std::size_t k = 0; k < rest.size(); ++k) {
      sb[k] = stride_in(b.labels, rest[k]);
      so[k] = stride_in(out_labels, rest[k]);
    }
    std::vector<int> v(rest.size(), 0);
    for (std::size_t n = 0; n < n_rest; ++n) {
      std::size_t ob = 0, oo = 0;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        ob += v[k] * sb[k];
        oo += v[k] * so[k];
      }
      rest_b[n] = ob;
      rest_out[n] = oo;
      for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
        if (++v[k] < dim) break;
        v[k] = 0;
      }
    }
  }

  const int ra = static_cast<int>(a.labels.size());
  std::vector<int> idx(ra, 0);
  for (std::size_t lin = 0; lin < ta.size(); ++lin) {
    if (lin > 0) {
      for (int k = ra - 1; k >= 0; --k) {
        if (++idx[k] < dim) break;
        idx[k] = 0;
      }
    }
    const Scalar& va = ta[lin];
    if (va.is_zero()) continue;
    std::size_t base_b = 0, base_out = 0;
    for (int k = 0; k < ra; ++k) {
      base_b += idx[k] * a_to_b[k];
      base_out += idx[k] * a_to_out[k];
    }
    for (std::size_t n = 0; n < n_rest; ++n) {
      const Scalar& vb = tb[base_b + rest_b[n]];
      if (vb.is_zero()) continue;
      out[base_out + rest_out[n]].add_product(va, vb);
    }
  }
  return make_owned(std::move(out), std::move(out_labels));
}

std::size_t union_size(const Factor& a, const Factor& b, int* shared) {
  int common = 0;
  for (int l : a.labels) {
    if (std::find(b.labels.begin(), b.labels.end(), l) != b.labels.end()) ++common;
  }
  *shared = common;
  return a.labels.size() + b.labels.size() - common;
}

}  // namespace

Tensor contract(const TensorRefs& operands, const ContractionSpec& spec) {
  if (operands.empty()) throw SpecError("contract: no operands");
  const int dim = operands.front().get().dim();
  std::vector<Factor> factors(operands.size());
  for (std::size_t t = 0; t < operands.size(); ++t) {
    const Tensor& op = operands[t].get();
    if (op.dim() != dim) throw SpecError("contract: operands have different dimensions");
    factors[t].tensor = &op;
    factors[t].labels.assign(op.rank(), std::numeric_limits<int>::min());
  }
  auto label_slot = [&](const AxisRef& ref) -> int& {
    if (ref.operand < 0 || ref.operand >= static_cast<int>(factors.size())) {
      throw SpecError("contract: operand reference out of range");
    }
    auto& labels = factors[ref.operand].labels;
    if (ref.axis < 0 || ref.axis >= static_cast<int>(labels.size())) {
      throw SpecError("contract: axis reference out of range");
    }
    int& slot = labels[ref.axis];
    if (slot != std::numeric_limits<int>::min()) {
      throw SpecError("contract: axis " + std::to_string(ref.axis) + " of operand " + std::to_string(ref.operand) +
                      " used twice");
    }
    return slot;
  };
  for (std::size_t k = 0; k < spec.free.size(); ++k) label_slot(spec.free[k]) = static_cast<int>(k);
  for (std::size_t k = 0; k < spec.bound.size(); ++k) {
    label_slot(spec.bound[k].first) = -1 - static_cast<int>(k);
    label_slot(spec.bound[k].second) = -1 - static_cast<int>(k);
  }
  for (const auto& f : factors) {
    for (int l : f.labels) {
      if (l == std::numeric_limits<int>::min()) throw SpecError("contract: operand axis neither bound nor free");
    }
  }
  if (spec.free.size() > static_cast<std::size_t>(Tensor::kMaxRank)) {
    throw SpecError("contract: output rank exceeds 8");
  }

  for (auto& f : factors) f = reduce_self_traces(f);

  while (factors.size() > 1) {
    std::size_t best_i = 0, best_j = 1;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    int best_shared = -1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      for (std::size_t j = i + 1; j < factors.size(); ++j) {
        int shared = 0;
        const std::size_t u = union_size(factors[i], factors[j], &shared);
        // Prefer pairs that actually sum something, then the smallest loop nest.
        const bool better = (shared > 0) != (best_shared > 0) ? shared > 0 : u < best_cost;
        if (better) {
          best_cost = u;
          best_shared = shared;
          best_i = i;
          best_j = j;
        }
      }
    }
    Factor merged = contract_pair(factors[best_i], factors[best_j]);
    factors.erase(factors.begin() + static_cast<std::ptrdiff_t>(best_j));
    factors[best_i] = std::move(merged);
  }

  const Factor& last = factors.front();
  std::vector<int> axes(last.labels.size());
  for (std::size_t k = 0; k < spec.free.size(); ++k) {
    const auto it = std::find(last.labels.begin(), last.labels.end(), static_cast<int>(k));
    axes[k] = static_cast<int>(it - last.labels.begin());
  }
  return last.tensor->transposed(axes);
}

Tensor einsum(std::string_view expr, const TensorRefs& operands) {
  const ContractionSpec spec = ContractionSpec::parse(expr);
  // Arity check against the expression.
  const auto lhs = expr.substr(0, expr.find("->"));
  const auto n_ops = static_cast<std::size_t>(std::count(lhs.begin(), lhs.end(), ',') + 1);
  if (n_ops != operands.size()) throw SpecError("einsum: operand count does not match '" + std::string(expr) + "'");
  return contract(operands, spec);
}

}  // namespace curvident
