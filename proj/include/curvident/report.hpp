#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvident/identities.hpp"
#include "curvident/models.hpp"

namespace curvident {

enum class IdentityId {
  patterson,
  weyl_patterson,
  lemma5,
  thmA_a,
  pa5,
  thmA_b,
  lemma6,
  thmB_a,
  eq42,
  thmB_b,
  appendix34,
};

/// CLI name, e.g. "thmA-a".
std::string to_string(IdentityId id);
/// Throws PreconditionError for unknown names ("all" is not an identity).
IdentityId identity_from_string(const std::string& name);
const std::vector<IdentityId>& all_identities();

Hypothesis hypothesis_of(IdentityId id);
/// 5 or 6 for the dimension-specific identities, 0 when any dimension works.
int required_dim(IdentityId id);
bool applies_to(IdentityId id, int dim);

/// Free leftover slots when the residual rank fits, traced otherwise.
LeftoverMode auto_mode(int dim, int copies);

/// One evaluation unit: an identity with, for the delta identities, one r.
struct Task {
  IdentityId id;
  int copies = 0;
};

/// The tasks for `id` on a dim-dimensional tensor. Delta identities expand to
/// every valid r unless `copies` picks one.
std::vector<Task> tasks_for(IdentityId id, int dim, std::optional<int> copies = std::nullopt);

/// appendix34 yields one report per group, everything else exactly one.
std::vector<ResidualReport> evaluate(const Task& task, const CurvatureTensor& r);

/// Runs fn(0..n-1) on up to `threads` workers. The first exception by index
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// CURVIDENT_THREADS if set to a positive integer, else 1.
int default_threads();

/// Independent nonzero components (i<j, k<l, (i,j) <= (k,l)).
ModelSpec explicit_spec_of(const CurvatureTensor& r);

/// A model and its tensor. The tensor is authoritative; a report re-read from
/// disk keeps its original spec but is rebuilt from the recorded components.
struct ResolvedModel {
  ModelSpec spec;
  CurvatureTensor curvature;
};

ResolvedModel resolve(const ModelSpec& spec);
/// Accepts a ModelSpec document or a RunReport document.
ResolvedModel resolve_file(const std::string& path);

struct VerifyOptions {
  std::vector<IdentityId> set;  // empty means every applicable identity
  std::optional<int> copies;
  std::optional<IdentityId> expect_fail;
  int threads = 1;
};

struct RunReport {
  RunReport(ModelSpec m, CurvatureTensor c) : model(std::move(m)), curvature(std::move(c)) {}

  ModelSpec model;
  CurvatureTensor curvature;
  InvariantReport invariants;
  TwoSteinReport two_stein;
  std::optional<Scalar> gauss_bonnet;
  std::vector<Task> tasks;
  std::vector<std::vector<ResidualReport>> results;  // parallel to tasks
  std::optional<IdentityId> expect_fail;
  bool pass = true;
  double elapsed_ms = 0;
};

/// Pass iff every residual whose hypothesis holds is zero, except that the
/// expect_fail identity must instead have a nonzero residual.
bool verdict(const RunReport& rep);

/// An identity asked for by name whose dimension does not match, or an
/// expect_fail outside the set, is a PreconditionError.
RunReport run_verify(const ResolvedModel& model, const VerifyOptions& opts);

/// Invariants and 2-stein data only.
RunReport run_invariants(const ResolvedModel& model);

Json invariants_to_json(const RunReport& rep);
/// Stable key order. elapsed_ms only when `timing`.
Json run_report_to_json(const RunReport& rep, bool timing = false);
std::string invariants_table(const RunReport& rep);
std::string verify_table(const RunReport& rep, bool timing = false);

struct RandomCheckOptions {
  int dim = 5;
  IdentityId identity = IdentityId::patterson;
  std::optional<int> copies;
  int trials = 10;
  std::uint64_t seed = 0;
  int terms = 4;
  int threads = 1;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::vector<ResidualReport> residuals;
  bool pass = true;
};

struct RandomCheckReport {
  RandomCheckOptions options;
  bool einsteinized = false;
  std::vector<TrialOutcome> trials;
  int passed = 0;
  double elapsed_ms = 0;
};

/// Trial t uses random_curvature(dim, seed + t, terms), einsteinized with
/// k = 1 when the identity assumes Einstein or super-Einstein. A trial fails
/// on any nonzero residual.
RandomCheckReport run_random_check(const RandomCheckOptions& opts);

Json random_check_to_json(const RandomCheckReport& rep, bool timing = false);
std::string random_check_table(const RandomCheckReport& rep, bool timing = false);

}  // namespace curvident
