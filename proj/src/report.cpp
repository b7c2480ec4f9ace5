#include "curvident/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "curvident/error.hpp"

namespace curvident {

namespace {

struct IdentityInfo {
  IdentityId id;
  const char* name;
  Hypothesis hypothesis;
  int dim;
};

const std::vector<IdentityInfo>& identity_table() {
  static const std::vector<IdentityInfo> table = {
      {IdentityId::patterson, "patterson", Hypothesis::universal, 0},
      {IdentityId::weyl_patterson, "weyl-patterson", Hypothesis::universal, 0},
      {IdentityId::lemma5, "lemma5", Hypothesis::einstein, 5},
      {IdentityId::thmA_a, "thmA-a", Hypothesis::einstein, 5},
      {IdentityId::pa5, "pa5", Hypothesis::super_einstein, 5},
      {IdentityId::thmA_b, "thmA-b", Hypothesis::super_einstein, 5},
      {IdentityId::lemma6, "lemma6", Hypothesis::einstein, 6},
      {IdentityId::thmB_a, "thmB-a", Hypothesis::einstein, 6},
      {IdentityId::eq42, "eq42", Hypothesis::super_einstein, 6},
      {IdentityId::thmB_b, "thmB-b", Hypothesis::super_einstein, 6},
      {IdentityId::appendix34, "appendix34", Hypothesis::einstein, 6},
  };
  return table;
}

const IdentityInfo& info(IdentityId id) {
  for (const auto& e : identity_table())
    if (e.id == id) return e;
  throw Error("unhandled identity");
}

bool is_delta(IdentityId id) { return id == IdentityId::patterson || id == IdentityId::weyl_patterson; }

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string idx_str(const std::vector<int>& idx) {
  std::string s = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(idx[i]);
  }
  return s + ")";
}

Json optional_scalar(const std::optional<Scalar>& s) { return s ? Json(s->str()) : Json(nullptr); }

std::string spec_summary(const ModelSpec& spec) {
  std::string s = to_string(spec.kind);
  for (const auto& [key, value] : spec.params) s += " " + key + "=" + value.str();
  if (!spec.factors.empty()) {
    s += " [";
    for (std::size_t f = 0; f < spec.factors.size(); ++f) s += (f ? " x " : "") + spec_summary(spec.factors[f]);
    s += "]";
  }
  if (!spec.components.empty()) s += " (" + std::to_string(spec.components.size()) + " components)";
  return s;
}

std::string residual_cell(const ResidualReport& r) {
  if (r.is_zero) return "zero";
  return "nonzero, max at " + idx_str(r.witness->idx) + " = " + r.witness->val.str();
}

void matrix_rows(std::ostringstream& os, const std::string& label, const Tensor& t) {
  const int n = t.dim();
  std::vector<std::string> cells(t.size());
  std::size_t width = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    cells[i] = t[i].str();
    width = std::max(width, cells[i].size());
  }
  for (int i = 0; i < n; ++i) {
    os << std::left << std::setw(16) << (i == 0 ? label : "") << std::right;
    for (int j = 0; j < n; ++j) os << ' ' << std::setw(static_cast<int>(width)) << cells[i * n + j];
    os << '\n';
  }
}

void scalar_row(std::ostringstream& os, const std::string& label, const std::string& value) {
  os << std::left << std::setw(16) << label << ' ' << value << '\n';
}

}  // namespace

std::string to_string(IdentityId id) { return info(id).name; }

IdentityId identity_from_string(const std::string& name) {
  for (const auto& e : identity_table())
    if (name == e.name) return e.id;
  throw PreconditionError("unknown identity '" + name + "'");
}

const std::vector<IdentityId>& all_identities() {
  static const std::vector<IdentityId> ids = [] {
    std::vector<IdentityId> out;
    for (const auto& e : identity_table()) out.push_back(e.id);
    return out;
  }();
  return ids;
}

Hypothesis hypothesis_of(IdentityId id) { return info(id).hypothesis; }

int required_dim(IdentityId id) { return info(id).dim; }

bool applies_to(IdentityId id, int dim) {
  if (id == IdentityId::patterson) return dim >= 2;
  if (id == IdentityId::weyl_patterson) return dim >= 3;
  return dim == required_dim(id);
}

LeftoverMode auto_mode(int dim, int copies) {
  return 2 * (dim + 1 - 2 * copies) > Tensor::kMaxRank ? LeftoverMode::traced : LeftoverMode::free;
}

std::vector<Task> tasks_for(IdentityId id, int dim, std::optional<int> copies) {
  if (!applies_to(id, dim)) {
    if (is_delta(id)) {
      throw PreconditionError(to_string(id) + " needs dimension >= " + (id == IdentityId::patterson ? "2" : "3") +
                              ", got " + std::to_string(dim));
    }
    throw PreconditionError(to_string(id) + " needs dimension " + std::to_string(required_dim(id)) + ", got " +
                            std::to_string(dim));
  }
  if (!is_delta(id)) return {{id, 0}};
  if (copies) {
    if (*copies < 1 || *copies > dim / 2) {
      throw PreconditionError("r must lie in 1.." + std::to_string(dim / 2) + " for dimension " +
                              std::to_string(dim) + ", got " + std::to_string(*copies));
    }
    return {{id, *copies}};
  }
  std::vector<Task> out;
  for (int c = 1; c <= dim / 2; ++c) out.push_back({id, c});
  return out;
}

std::vector<ResidualReport> evaluate(const Task& task, const CurvatureTensor& r) {
  switch (task.id) {
    case IdentityId::patterson:
    case IdentityId::weyl_patterson: {
      const LeftoverMode mode = auto_mode(r.dim(), task.copies);
      ResidualReport rep = task.id == IdentityId::patterson ? patterson_residual(r, task.copies, mode)
                                                            : weyl_patterson_residual(r, task.copies, mode);
      rep.identity += "(r=" + std::to_string(task.copies) + (mode == LeftoverMode::traced ? ",traced)" : ")");
      return {std::move(rep)};
    }
    case IdentityId::lemma5:
      return {lemma5_einstein_residual(r)};
    case IdentityId::thmA_a:
      return {thmA_einstein_residual(r)};
    case IdentityId::pa5:
      return {pa5_residual(r)};
    case IdentityId::thmA_b:
      return {thmA_super_residual(r)};
    case IdentityId::lemma6:
      return {lemma6_einstein_residual(r)};
    case IdentityId::thmB_a:
      return {thmB_einstein_residual(r)};
    case IdentityId::eq42:
      return {super6_intermediate_residual(r)};
    case IdentityId::thmB_b:
      return {thmB_super_residual(r)};
    case IdentityId::appendix34: {
      const bool einstein = invariants(r).einstein;
      std::vector<ResidualReport> out;
      for (const SideBySide& g : lemma6_groups(r)) {
        out.push_back(make_report("appendix34 " + g.label, Hypothesis::einstein, einstein, g.lhs - g.rhs));
      }
      return out;
    }
  }
  throw Error("unhandled identity");
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int default_threads() {
  const char* env = std::getenv("CURVIDENT_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) return 1;
  return static_cast<int>(v);
}

ModelSpec explicit_spec_of(const CurvatureTensor& r) {
  const int n = r.dim();
  std::vector<ComponentEntry> comps;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          if (std::pair(i, j) > std::pair(k, l)) continue;
          const Scalar& v = r(i, j, k, l);
          if (!v.is_zero()) comps.push_back({{i, j, k, l}, v});
        }
  return ModelSpec::explicit_list(n, std::move(comps));
}

ResolvedModel resolve(const ModelSpec& spec) { return {spec, build(spec)}; }

ResolvedModel resolve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("explicit_model")) {
    if (!j.contains("model")) throw SchemaError("/model", "missing");
    return {model_from_json(j["model"], "/model"), build(model_from_json(j["explicit_model"], "/explicit_model"))};
  }
  return resolve(model_from_json(j));
}

bool verdict(const RunReport& rep) {
  bool expected_seen = false;
  for (std::size_t t = 0; t < rep.tasks.size(); ++t) {
    const bool expected = rep.expect_fail && rep.tasks[t].id == *rep.expect_fail;
    for (const ResidualReport& r : rep.results[t]) {
      if (expected) {
        if (!r.is_zero) expected_seen = true;
      } else if (r.hypothesis_met && !r.is_zero) {
        return false;
      }
    }
  }
  return !rep.expect_fail || expected_seen;
}

RunReport run_invariants(const ResolvedModel& model) {
  RunReport rep{model.spec, model.curvature};
  rep.invariants = invariants(model.curvature);
  rep.two_stein = two_stein_check(model.curvature);
  if (model.curvature.dim() == 6) rep.gauss_bonnet = gauss_bonnet_integrand_6(model.curvature);
  return rep;
}

RunReport run_verify(const ResolvedModel& model, const VerifyOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = model.curvature.dim();
  std::vector<IdentityId> ids;
  if (opts.set.empty()) {
    for (IdentityId id : all_identities())
      if (applies_to(id, dim)) ids.push_back(id);
  } else {
    for (IdentityId id : opts.set)
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (opts.expect_fail && std::find(ids.begin(), ids.end(), *opts.expect_fail) == ids.end()) {
    throw PreconditionError("--expect-fail " + to_string(*opts.expect_fail) + " is not among the identities run");
  }
  RunReport rep = run_invariants(model);
  rep.expect_fail = opts.expect_fail;
  for (IdentityId id : ids) {
    // An explicit r only narrows the delta identities.
    const std::vector<Task> ts = tasks_for(id, dim, is_delta(id) ? opts.copies : std::nullopt);
    rep.tasks.insert(rep.tasks.end(), ts.begin(), ts.end());
  }
  rep.results.resize(rep.tasks.size());
  parallel_for(rep.tasks.size(), opts.threads,
               [&](std::size_t i) { rep.results[i] = evaluate(rep.tasks[i], model.curvature); });
  rep.pass = verdict(rep);
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

Json invariants_to_json(const RunReport& rep) {
  const InvariantReport& v = rep.invariants;
  Json j;
  j["dim"] = v.dim;
  j["tau"] = v.tau.str();
  j["ricci"] = matrix_to_json(v.ricci);
  j["ricci_norm_sq"] = v.ricci_norm_sq.str();
  j["R_norm_sq"] = v.R_norm_sq.str();
  j["T_check"] = matrix_to_json(v.t_check);
  j["R_check"] = matrix_to_json(v.r_check);
  j["R_hat"] = matrix_to_json(v.r_hat2);
  j["R_ring"] = matrix_to_json(v.r_ring2);
  j["R_hat0"] = v.r_hat0.str();
  j["R_ring0"] = v.r_ring0.str();
  j["einstein"] = v.einstein;
  j["super_einstein"] = v.super_einstein;
  Json ts;
  ts["is_two_stein"] = rep.two_stein.is_two_stein;
  ts["mu1"] = optional_scalar(rep.two_stein.mu1);
  ts["mu2"] = optional_scalar(rep.two_stein.mu2);
  if (rep.two_stein.witness) {
    ts["witness"] = {{"idx", *rep.two_stein.witness},
                     {"coefficient", rep.two_stein.witness_coefficient->str()},
                     {"expected", rep.two_stein.witness_expected->str()}};
  }
  j["two_stein"] = std::move(ts);
  if (rep.gauss_bonnet) j["gauss_bonnet_integrand"] = rep.gauss_bonnet->str();
  return j;
}

Json run_report_to_json(const RunReport& rep, bool timing) {
  Json j;
  j["model"] = model_to_json(rep.model);
  j["explicit_model"] = model_to_json(explicit_spec_of(rep.curvature));
  j["invariants"] = invariants_to_json(rep);
  Json residuals = Json::array();
  for (const auto& group : rep.results)
    for (const ResidualReport& r : group) residuals.push_back(residual_to_json(r));
  j["residuals"] = std::move(residuals);
  if (rep.expect_fail) j["expect_fail"] = to_string(*rep.expect_fail);
  j["verdict"] = rep.pass ? "pass" : "fail";
  if (timing) j["elapsed_ms"] = rep.elapsed_ms;
  return j;
}

std::string invariants_table(const RunReport& rep) {
  const InvariantReport& v = rep.invariants;
  std::ostringstream os;
  scalar_row(os, "model", spec_summary(rep.model));
  scalar_row(os, "dim", std::to_string(v.dim));
  scalar_row(os, "tau", v.tau.str());
  scalar_row(os, "|rho|^2", v.ricci_norm_sq.str());
  scalar_row(os, "|R|^2", v.R_norm_sq.str());
  matrix_rows(os, "rho", v.ricci);
  matrix_rows(os, "T_check", v.t_check);
  matrix_rows(os, "R_check", v.r_check);
  matrix_rows(os, "R_hat", v.r_hat2);
  matrix_rows(os, "R_ring", v.r_ring2);
  scalar_row(os, "R_hat0", v.r_hat0.str());
  scalar_row(os, "R_ring0", v.r_ring0.str());
  scalar_row(os, "einstein", v.einstein ? "yes" : "no");
  scalar_row(os, "super-einstein", v.super_einstein ? "yes" : "no");
  const TwoSteinReport& ts = rep.two_stein;
  std::string two = ts.is_two_stein ? "yes" : "no";
  if (ts.mu1) two += ", mu1=" + ts.mu1->str();
  if (ts.mu2) two += ", mu2=" + ts.mu2->str();
  if (ts.witness) {
    two += ", Sym(C)" + idx_str(*ts.witness) + " = " + ts.witness_coefficient->str() + " but mu2 Sym(gg) gives " +
           ts.witness_expected->str();
  }
  scalar_row(os, "2-stein", two);
  if (rep.gauss_bonnet) scalar_row(os, "gauss-bonnet", rep.gauss_bonnet->str());
  return os.str();
}

std::string verify_table(const RunReport& rep, bool timing) {
  std::ostringstream os;
  scalar_row(os, "model", spec_summary(rep.model));
  std::size_t width = 8;
  for (const auto& group : rep.results)
    for (const ResidualReport& r : group) width = std::max(width, r.identity.size());
  os << std::left << std::setw(static_cast<int>(width)) << "identity" << "  " << std::setw(15) << "hypothesis"
     << "  met  residual\n";
  for (const auto& group : rep.results)
    for (const ResidualReport& r : group) {
      os << std::setw(static_cast<int>(width)) << r.identity << "  " << std::setw(15) << to_string(r.hypothesis)
         << "  " << std::setw(3) << (r.hypothesis_met ? "yes" : "no") << "  " << residual_cell(r) << '\n';
    }
  os << std::right;
  if (rep.expect_fail) os << "expect-fail: " << to_string(*rep.expect_fail) << '\n';
  os << "verdict: " << (rep.pass ? "pass" : "fail") << '\n';
  if (timing) os << "elapsed: " << std::fixed << std::setprecision(1) << rep.elapsed_ms << " ms\n";
  return os.str();
}

RandomCheckReport run_random_check(const RandomCheckOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.trials < 1) throw PreconditionError("need at least one trial");
  if (opts.terms < 1) throw PreconditionError("need at least one term");
  if (opts.dim < 2 || opts.dim > Tensor::kMaxDim) {
    throw PreconditionError("dimension must lie in 2.." + std::to_string(Tensor::kMaxDim));
  }
  RandomCheckReport rep;
  rep.options = opts;
  rep.einsteinized = hypothesis_of(opts.identity) != Hypothesis::universal;
  const std::vector<Task> tasks = tasks_for(opts.identity, opts.dim, opts.copies);
  rep.trials.resize(static_cast<std::size_t>(opts.trials));
  parallel_for(rep.trials.size(), opts.threads, [&](std::size_t t) {
    TrialOutcome& out = rep.trials[t];
    out.seed = opts.seed + t;
    CurvatureTensor r = random_curvature(opts.dim, out.seed, opts.terms);
    if (rep.einsteinized) r = einsteinize(r, Scalar(1));
    for (const Task& task : tasks) {
      for (ResidualReport& res : evaluate(task, r)) {
        if (!res.is_zero) out.pass = false;
        out.residuals.push_back(std::move(res));
      }
    }
  });
  rep.passed = static_cast<int>(std::count_if(rep.trials.begin(), rep.trials.end(), [](const auto& t) { return t.pass; }));
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

Json random_check_to_json(const RandomCheckReport& rep, bool timing) {
  const RandomCheckOptions& o = rep.options;
  Json j;
  j["dim"] = o.dim;
  j["identity"] = to_string(o.identity);
  if (o.copies) j["r"] = *o.copies;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["terms"] = o.terms;
  j["inputs"] = rep.einsteinized ? "einsteinized" : "raw";
  j["passed"] = rep.passed;
  j["failed"] = o.trials - rep.passed;
  Json failures = Json::array();
  for (const TrialOutcome& t : rep.trials) {
    if (t.pass) continue;
    Json res = Json::array();
    for (const ResidualReport& r : t.residuals)
      if (!r.is_zero) res.push_back(residual_to_json(r));
    failures.push_back(Json{{"seed", t.seed}, {"residuals", std::move(res)}});
  }
  j["first_failing_seed"] = failures.empty() ? Json(nullptr) : failures[0]["seed"];
  j["failures"] = std::move(failures);
  j["verdict"] = rep.passed == o.trials ? "pass" : "fail";
  if (timing) j["elapsed_ms"] = rep.elapsed_ms;
  return j;
}

std::string random_check_table(const RandomCheckReport& rep, bool timing) {
  const RandomCheckOptions& o = rep.options;
  std::ostringstream os;
  os << "identity " << to_string(o.identity);
  if (o.copies) os << " r=" << *o.copies;
  os << ", dim " << o.dim << ", " << (rep.einsteinized ? "einsteinized" : "raw") << " inputs, seeds " << o.seed
     << ".." << o.seed + static_cast<std::uint64_t>(o.trials) - 1 << '\n';
  os << rep.passed << "/" << o.trials << " zero\n";
  for (const TrialOutcome& t : rep.trials) {
    if (t.pass) continue;
    for (const ResidualReport& r : t.residuals)
      if (!r.is_zero) os << "  seed " << t.seed << "  " << r.identity << "  " << residual_cell(r) << '\n';
  }
  os << "verdict: " << (rep.passed == o.trials ? "pass" : "fail") << '\n';
  if (timing) os << "elapsed: " << std::fixed << std::setprecision(1) << rep.elapsed_ms << " ms\n";
  return os.str();
}

}  // namespace curvident
