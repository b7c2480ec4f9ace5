#include "curvident/delta.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>

#include "curvident/error.hpp"

namespace curvident {

namespace {

constexpr int kMaxOrder = 8;
constexpr std::size_t kMaxGroupSize = 20000;
constexpr int kFree = -1;

/// X[idx] = sign * X[idx'] where idx'[perm[p]] = idx[p].
struct SymElement {
  std::vector<int> perm;
  int sign = 1;
};

struct OperandShape {
  int rank = 0;
  int cls = 0;  // operands in one class are exactly equal
  std::vector<SymElement> group;
};

/// A contraction network in canonical form. codes[x] is the partner slot of
/// operand slot x, or kFree.
struct Network {
  std::vector<int> codes;
  std::vector<int> operand_at;
};

struct Term {
  int network = 0;
  std::vector<int> outpos;  // output position of each free network axis
  std::vector<std::pair<int, int>> gpairs;
  std::int64_t coef = 0;
};

struct Plan {
  std::vector<Network> networks;
  std::vector<Term> terms;
  int n_lower_free = 0;
  int n_upper_free = 0;
};

int parity(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inv;
  return inv % 2 == 0 ? 1 : -1;
}

std::vector<SymElement> detect_symmetries(const Tensor& x) {
  std::vector<int> perm(x.rank());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SymElement> group{{perm, 1}};
  if (x.rank() > 4) return group;
  const Tensor neg = -x;
  while (std::next_permutation(perm.begin(), perm.end())) {
    const Tensor y = x.transposed(perm);
    if (tensors_equal(y, x)) {
      group.push_back({perm, 1});
    } else if (tensors_equal(y, neg)) {
      group.push_back({perm, -1});
    }
  }
  return group;
}

struct Layout {
  std::vector<int> offset;  // first slot of each operand
  std::vector<int> owner;   // operand of each slot
  int n_slots = 0;
};

Layout make_layout(const std::vector<OperandShape>& shapes) {
  Layout l;
  for (std::size_t t = 0; t < shapes.size(); ++t) {
    l.offset.push_back(l.n_slots);
    for (int a = 0; a < shapes[t].rank; ++a) l.owner.push_back(static_cast<int>(t));
    l.n_slots += shapes[t].rank;
  }
  return l;
}

/// Enumerates the symmetry group of the operand list: per-operand
/// symmetries combined with permutations of equal operands.
class Group {
 public:
  Group(const std::vector<OperandShape>& shapes) : shapes_(shapes) {
    const int n = static_cast<int>(shapes.size());
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    do {
      bool ok = true;
      for (int t = 0; t < n && ok; ++t) ok = shapes[t].cls == shapes[pi[t]].cls;
      if (ok) perms_.push_back(pi);
    } while (std::next_permutation(pi.begin(), pi.end()));
    std::size_t size = perms_.size();
    for (const auto& s : shapes) {
      size *= s.group.size();
      if (size > kMaxGroupSize) break;
    }
    trivial_ = size > kMaxGroupSize;
  }

  /// Calls fn(pi, choice) for every element; choice[t] indexes shapes[t].group.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    const int n = static_cast<int>(shapes_.size());
    std::vector<int> choice(n, 0);
    if (trivial_) {
      fn(perms_.front(), choice);
      return;
    }
    for (const auto& pi : perms_) {
      std::fill(choice.begin(), choice.end(), 0);
      while (true) {
        fn(pi, choice);
        int t = n - 1;
        for (; t >= 0; --t) {
          if (++choice[t] < static_cast<int>(shapes_[t].group.size())) break;
          choice[t] = 0;
        }
        if (t < 0) break;
      }
    }
  }

 private:
  const std::vector<OperandShape>& shapes_;
  std::vector<std::vector<int>> perms_;
  bool trivial_ = false;
};

struct Canonical {
  std::vector<int> codes;
  std::vector<int> outpos;
  std::vector<int> operand_at;
  int sign = 1;
  bool zero = false;
};

/// Lexicographically smallest image of a raw network under the group.
/// raw[x] is a partner slot or -(1 + output position).
Canonical canonicalize(const std::vector<int>& raw, const std::vector<OperandShape>& shapes, const Layout& layout,
                       const Group& group) {
  Canonical best;
  bool have = false;
  const int n_slots = layout.n_slots;
  std::vector<int> map(n_slots);
  std::vector<int> codes(n_slots);
  std::vector<int> outpos_at(n_slots);
  std::vector<int> outpos;

  group.for_each([&](const std::vector<int>& pi, const std::vector<int>& choice) {
    int sign = 1;
    for (int x = 0; x < n_slots; ++x) {
      const int t = layout.owner[x];
      const SymElement& e = shapes[t].group[choice[t]];
      map[x] = layout.offset[pi[t]] + e.perm[x - layout.offset[t]];
    }
    for (std::size_t t = 0; t < shapes.size(); ++t) sign *= shapes[t].group[choice[t]].sign;
    for (int x = 0; x < n_slots; ++x) {
      if (raw[x] >= 0) {
        codes[map[x]] = map[raw[x]];
      } else {
        codes[map[x]] = kFree;
        outpos_at[map[x]] = -1 - raw[x];
      }
    }
    if (have) {
      if (codes > best.codes) return;
      outpos.clear();
      for (int x = 0; x < n_slots; ++x)
        if (codes[x] == kFree) outpos.push_back(outpos_at[x]);
      if (codes == best.codes) {
        if (outpos == best.outpos && sign != best.sign) best.zero = true;
        return;
      }
    } else {
      outpos.clear();
      for (int x = 0; x < n_slots; ++x)
        if (codes[x] == kFree) outpos.push_back(outpos_at[x]);
    }
    have = true;
    best.codes = codes;
    best.outpos = outpos;
    best.sign = sign;
    best.operand_at.assign(shapes.size(), 0);
    for (std::size_t t = 0; t < shapes.size(); ++t) best.operand_at[pi[t]] = static_cast<int>(t);
  });
  return best;
}

enum class SlotKind { free, operand, traced };

struct SlotInfo {
  SlotKind kind = SlotKind::free;
  int value = 0;  // output position, operand slot, or traced partner node
};

std::shared_ptr<const Plan> build_plan(const DeltaSpec& spec, const std::vector<OperandShape>& shapes, int dim) {
  const int n = spec.order;
  const Layout layout = make_layout(shapes);

  // Nodes 0..n-1 are lower slots, n..2n-1 upper slots.
  std::vector<SlotInfo> node(2 * n);
  for (const auto& [lo, up] : spec.traces) {
    node[lo] = {SlotKind::traced, n + up};
    node[n + up] = {SlotKind::traced, lo};
  }
  for (int s = 0; s < n; ++s) {
    if (spec.lower[s]) node[s] = {SlotKind::operand, layout.offset[spec.lower[s]->operand] + spec.lower[s]->axis};
    if (spec.upper[s]) node[n + s] = {SlotKind::operand, layout.offset[spec.upper[s]->operand] + spec.upper[s]->axis};
  }
  auto plan = std::make_shared<Plan>();
  int outpos = 0;
  for (int s = 0; s < 2 * n; ++s) {
    if (s == n) plan->n_lower_free = outpos;
    if (node[s].kind == SlotKind::free) node[s].value = outpos++;
  }
  plan->n_upper_free = outpos - plan->n_lower_free;

  // Raw networks keyed by (codes, g pairs), coefficients summed.
  std::map<std::pair<std::vector<int>, std::vector<std::pair<int, int>>>, std::int64_t> raw_terms;
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<int> partner(2 * n);
  std::vector<char> seen(2 * n);
  std::vector<int> codes(layout.n_slots);
  do {
    for (int s = 0; s < n; ++s) {
      partner[s] = n + sigma[s];
      partner[n + sigma[s]] = s;
    }
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::pair<int, int>> gpairs;
    for (int start = 0; start < 2 * n; ++start) {
      if (seen[start] || node[start].kind == SlotKind::traced) continue;
      int cur = start;
      seen[cur] = 1;
      int end = -1;
      while (true) {
        const int nxt = partner[cur];
        seen[nxt] = 1;
        if (node[nxt].kind == SlotKind::traced) {
          cur = node[nxt].value;
          seen[cur] = 1;
          continue;
        }
        end = nxt;
        break;
      }
      const SlotInfo& a = node[start];
      const SlotInfo& b = node[end];
      if (a.kind == SlotKind::free && b.kind == SlotKind::free) {
        gpairs.emplace_back(std::min(a.value, b.value), std::max(a.value, b.value));
      } else if (a.kind == SlotKind::free) {
        codes[b.value] = -1 - a.value;
      } else if (b.kind == SlotKind::free) {
        codes[a.value] = -1 - b.value;
      } else {
        codes[a.value] = b.value;
        codes[b.value] = a.value;
      }
    }
    std::int64_t coef = parity(sigma);
    for (int s = 0; s < 2 * n; ++s) {
      if (seen[s]) continue;
      coef *= dim;
      int cur = s;
      do {
        seen[cur] = 1;
        const int nxt = partner[cur];
        seen[nxt] = 1;
        cur = node[nxt].value;
      } while (!seen[cur]);
    }
    std::sort(gpairs.begin(), gpairs.end());
    raw_terms[{codes, std::move(gpairs)}] += coef;
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  const Group group(shapes);
  std::map<std::vector<int>, int> network_ids;
  std::map<std::tuple<int, std::vector<int>, std::vector<std::pair<int, int>>>, std::int64_t> merged;
  for (const auto& [key, coef] : raw_terms) {
    if (coef == 0) continue;
    Canonical c = canonicalize(key.first, shapes, layout, group);
    if (c.zero) continue;
    auto [it, inserted] = network_ids.try_emplace(c.codes, static_cast<int>(plan->networks.size()));
    if (inserted) plan->networks.push_back({c.codes, c.operand_at});
    merged[{it->second, c.outpos, key.second}] += coef * c.sign;
  }
  for (auto& [key, coef] : merged) {
    if (coef == 0) continue;
    plan->terms.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), coef});
  }
  return plan;
}

std::string cache_key(const DeltaSpec& spec, const std::vector<OperandShape>& shapes, int dim) {
  std::ostringstream os;
  os << dim << '|' << spec.order << '|';
  for (const auto& slots : {spec.lower, spec.upper}) {
    for (const auto& s : slots) {
      if (s) {
        os << s->operand << '.' << s->axis << ',';
      } else {
        os << "-,";
      }
    }
    os << '|';
  }
  for (const auto& [a, b] : spec.traces) os << a << '~' << b << ',';
  os << '|';
  for (const auto& s : shapes) {
    os << s.rank << ':' << s.cls << '{';
    for (const auto& e : s.group) {
      for (int p : e.perm) os << p;
      os << (e.sign > 0 ? '+' : '-');
    }
    os << '}';
  }
  return os.str();
}

std::mutex g_cache_mutex;
std::map<std::string, std::shared_ptr<const Plan>> g_cache;

void validate(const TensorRefs& operands, const DeltaSpec& spec, int dim) {
  if (dim < Tensor::kMinDim || dim > Tensor::kMaxDim) throw SpecError("delta: dimension outside 2..6");
  if (spec.order < 1 || spec.order > kMaxOrder) throw SpecError("delta: order must be in 1..8");
  if (static_cast<int>(spec.lower.size()) != spec.order || static_cast<int>(spec.upper.size()) != spec.order) {
    throw SpecError("delta: slot lists do not match the order");
  }
  std::vector<std::vector<int>> used(operands.size());
  for (std::size_t t = 0; t < operands.size(); ++t) {
    if (operands[t].get().dim() != dim) throw SpecError("delta: operand dimension mismatch");
    used[t].assign(operands[t].get().rank(), 0);
  }
  std::vector<int> lower_used(spec.order, 0), upper_used(spec.order, 0);
  auto attach = [&](const std::optional<AxisRef>& ref, int& slot_used) {
    if (!ref) return;
    if (ref->operand < 0 || ref->operand >= static_cast<int>(operands.size()) || ref->axis < 0 ||
        ref->axis >= static_cast<int>(used[ref->operand].size())) {
      throw SpecError("delta: binding refers to a missing operand axis");
    }
    if (used[ref->operand][ref->axis]++) {
      throw SpecError("delta: operand " + std::to_string(ref->operand) + " axis " + std::to_string(ref->axis) +
                      " bound twice");
    }
    slot_used = 1;
  };
  for (int s = 0; s < spec.order; ++s) {
    attach(spec.lower[s], lower_used[s]);
    attach(spec.upper[s], upper_used[s]);
  }
  for (const auto& [lo, up] : spec.traces) {
    if (lo < 0 || lo >= spec.order || up < 0 || up >= spec.order) throw SpecError("delta: trace slot out of range");
    if (lower_used[lo]++ || upper_used[up]++) throw SpecError("delta: traced slot already in use");
  }
  for (std::size_t t = 0; t < used.size(); ++t) {
    for (int u : used[t]) {
      if (!u) throw SpecError("delta: operand " + std::to_string(t) + " has an unbound axis");
    }
  }
  const int n_free = static_cast<int>(std::count(lower_used.begin(), lower_used.end(), 0) +
                                      std::count(upper_used.begin(), upper_used.end(), 0));
  if (n_free > Tensor::kMaxRank) throw SpecError("delta: output rank " + std::to_string(n_free) + " exceeds 8");
}

/// Visits every arrangement of `sorted` (distinct values) with its sign.
template <typename Fn>
void for_each_signed_perm(std::vector<int> sorted, Fn&& fn) {
  do {
    fn(sorted, parity(sorted));
  } while (std::next_permutation(sorted.begin(), sorted.end()));
}

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

}  // namespace

Tensor generalized_delta_contract(const TensorRefs& operands, const DeltaSpec& spec, int dim) {
  validate(operands, spec, dim);

  std::vector<OperandShape> shapes(operands.size());
  for (std::size_t t = 0; t < operands.size(); ++t) {
    const Tensor& x = operands[t].get();
    shapes[t].rank = x.rank();
    shapes[t].cls = static_cast<int>(t);
    for (std::size_t u = 0; u < t; ++u) {
      const Tensor& y = operands[u].get();
      if (y.rank() == x.rank() && tensors_equal(x, y)) {
        shapes[t].cls = shapes[u].cls;
        shapes[t].group = shapes[u].group;
        break;
      }
    }
    if (shapes[t].cls == static_cast<int>(t)) shapes[t].group = detect_symmetries(x);
  }

  int n_free = 0;
  {
    std::vector<int> busy_lo(spec.order, 0), busy_up(spec.order, 0);
    for (int s = 0; s < spec.order; ++s) {
      busy_lo[s] = spec.lower[s].has_value();
      busy_up[s] = spec.upper[s].has_value();
    }
    for (const auto& [lo, up] : spec.traces) busy_lo[lo] = busy_up[up] = 1;
    n_free = static_cast<int>(std::count(busy_lo.begin(), busy_lo.end(), 0) +
                              std::count(busy_up.begin(), busy_up.end(), 0));
  }
  Tensor out(dim, n_free);
  for (const auto& op : operands) {
    if (op.get().is_zero()) return out;
  }

  const std::string key = cache_key(spec, shapes, dim);
  std::shared_ptr<const Plan> plan;
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) plan = it->second;
  }
  if (!plan) {
    plan = build_plan(spec, shapes, dim);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_cache.emplace(key, plan);
  }

  const int fl = plan->n_lower_free;
  const int fu = plan->n_upper_free;
  if (fl > dim || fu > dim || plan->terms.empty()) return out;

  // Evaluate each network referenced by a surviving term.
  std::vector<char> needed(plan->networks.size(), 0);
  for (const auto& term : plan->terms) needed[term.network] = 1;
  std::vector<Tensor> values(plan->networks.size());
  for (std::size_t k = 0; k < plan->networks.size(); ++k) {
    if (!needed[k]) continue;
    const Network& net = plan->networks[k];
    if (operands.empty()) {
      values[k] = Tensor::scalar(dim, Scalar(1));
      continue;
    }
    TensorRefs refs;
    std::vector<int> pos_offset;
    int slot = 0;
    for (int t : net.operand_at) {
      refs.push_back(operands[t]);
      pos_offset.push_back(slot);
      slot += operands[t].get().rank();
    }
    auto ref_of = [&](int x) {
      int q = static_cast<int>(std::upper_bound(pos_offset.begin(), pos_offset.end(), x) - pos_offset.begin()) - 1;
      return AxisRef{q, x - pos_offset[q]};
    };
    ContractionSpec cs;
    for (int x = 0; x < static_cast<int>(net.codes.size()); ++x) {
      if (net.codes[x] == kFree) {
        cs.free.push_back(ref_of(x));
      } else if (net.codes[x] > x) {
        cs.bound.emplace_back(ref_of(x), ref_of(net.codes[x]));
      }
    }
    values[k] = contract(refs, cs);
  }

  // Antisymmetry in the free lower and free upper slots: evaluate on
  // increasing tuples only, then scatter.
  std::vector<int> lo(fl), up(fu);
  std::iota(lo.begin(), lo.end(), 0);
  std::vector<int> idx(n_free);
  std::vector<int> perm_idx(n_free);
  do {
    std::iota(up.begin(), up.end(), 0);
    do {
      std::copy(lo.begin(), lo.end(), idx.begin());
      std::copy(up.begin(), up.end(), idx.begin() + fl);
      Scalar value;
      for (const auto& term : plan->terms) {
        bool alive = true;
        for (const auto& [a, b] : term.gpairs) {
          if (idx[a] != idx[b]) {
            alive = false;
            break;
          }
        }
        if (!alive) continue;
        const Tensor& v = values[term.network];
        std::size_t off = 0;
        for (int p : term.outpos) off = off * dim + idx[p];
        const Scalar& x = v[off];
        if (x.is_zero()) continue;
        value.add_product(Scalar(term.coef), x);
      }
      if (value.is_zero()) continue;
      const Scalar neg = -value;
      for_each_signed_perm(lo, [&](const std::vector<int>& pl, int sl) {
        std::copy(pl.begin(), pl.end(), perm_idx.begin());
        for_each_signed_perm(up, [&](const std::vector<int>& pu, int su) {
          std::copy(pu.begin(), pu.end(), perm_idx.begin() + fl);
          out.at(perm_idx) = sl * su > 0 ? value : neg;
        });
      });
    } while (next_combination(up, dim));
  } while (next_combination(lo, dim));
  return out;
}

std::size_t delta_plan_cache_size() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  return g_cache.size();
}

}  // namespace curvident
