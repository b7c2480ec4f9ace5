/**
 * @file curvident.cpp
 * @brief Command-line front end.
 *
 * Commands:
 *   invariants    invariant table of a model
 *   verify        run identity residuals on a model
 *   random-check  run an identity over seeded random tensors
 *   export        write the verify report as JSON
 *
 * Exit codes: 0 pass, 1 identity failure, 2 usage or input error.
 */

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "curvident/error.hpp"
#include "curvident/report.hpp"

using namespace curvident;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct ModelFlags {
  std::string model;
  std::optional<std::string> k;
  std::optional<std::string> tau;
  std::optional<int> dim;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;
  std::optional<std::string> file;
  std::uint64_t seed = 0;
  int terms = 4;
};

struct OutputFlags {
  bool json = false;
  bool timing = false;
  std::optional<std::string> out;
};

struct RunFlags {
  std::vector<std::string> set;
  std::optional<int> r;
  std::optional<std::string> expect_fail;
  int threads = 1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--model", f.model,
                  "example5d | example6d | sl3so3 | flat | constant | nikolayevsky | random-einstein | file")
      ->required();
  cmd->add_option("--k", f.k, "curvature parameter (example5d, example6d, constant, random-einstein)");
  cmd->add_option("--tau", f.tau, "scalar curvature instead of --k (random-einstein)");
  cmd->add_option("--dim", f.dim, "dimension (flat, constant, random-einstein)");
  cmd->add_option("--alpha", f.alpha, "nikolayevsky alpha");
  cmd->add_option("--beta", f.beta, "nikolayevsky beta");
  cmd->add_option("--file", f.file, "ModelSpec or report JSON (--model file)");
  cmd->add_option("--seed", f.seed, "random-einstein seed");
  cmd->add_option("--terms", f.terms, "random-einstein Kulkarni-Nomizu terms")->check(CLI::Range(1, 1000));
}

void add_output_flags(CLI::App* cmd, OutputFlags& f, bool with_json = true) {
  if (with_json) cmd->add_flag("--json", f.json, "print JSON instead of a table");
  cmd->add_flag("--timing", f.timing, "include elapsed time (output then varies between runs)");
  if (with_json) cmd->add_option("--out", f.out, "write output to a file instead of stdout");
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--set", f.set, "identities to run, or 'all' (default)")->delimiter(',');
  cmd->add_option("--r", f.r, "number of curvature factors for patterson / weyl-patterson");
  cmd->add_option("--expect-fail", f.expect_fail, "identity that must have a nonzero residual");
  cmd->add_option("--threads", f.threads, "worker threads (default CURVIDENT_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
}

Scalar scalar_flag(const std::optional<std::string>& v, const char* name, const char* fallback = nullptr) {
  if (v) return Scalar::parse(*v);
  if (fallback) return Scalar::parse(fallback);
  throw PreconditionError(std::string("--") + name + " is required for this model");
}

int dim_flag(const ModelFlags& f) {
  if (!f.dim) throw PreconditionError("--dim is required for this model");
  return *f.dim;
}

ResolvedModel resolve_flags(const ModelFlags& f) {
  const std::string& m = f.model;
  if (m == "file") {
    if (!f.file) throw PreconditionError("--file is required with --model file");
    return resolve_file(*f.file);
  }
  ModelSpec spec;
  if (m == "example5d") {
    spec = ModelSpec::example5d(scalar_flag(f.k, "k", "1"));
  } else if (m == "example6d") {
    spec = ModelSpec::example6d(scalar_flag(f.k, "k", "1"));
  } else if (m == "sl3so3") {
    spec = ModelSpec::sl3so3();
  } else if (m == "flat") {
    spec = ModelSpec::flat(dim_flag(f));
  } else if (m == "constant") {
    spec = ModelSpec::constant(dim_flag(f), scalar_flag(f.k, "k"));
  } else if (m == "nikolayevsky") {
    spec = ModelSpec::nikolayevsky(scalar_flag(f.alpha, "alpha"), scalar_flag(f.beta, "beta"));
  } else if (m == "random-einstein") {
    if (f.k && f.tau) throw PreconditionError("give either --k or --tau, not both");
    spec = ModelSpec::random_einstein(dim_flag(f), f.seed, f.terms, scalar_flag(f.k, "k", "1"));
    if (f.tau) {
      spec.params.erase("k");
      spec.params["tau"] = Scalar::parse(*f.tau);
    }
  } else {
    throw PreconditionError("unknown model '" + m + "'");
  }
  return resolve(spec);
}

VerifyOptions verify_options(const RunFlags& f) {
  VerifyOptions o;
  bool all = f.set.empty();
  for (const std::string& s : f.set) {
    if (s == "all") {
      all = true;
    } else {
      o.set.push_back(identity_from_string(s));
    }
  }
  if (all) o.set.clear();
  o.copies = f.r;
  if (f.expect_fail) o.expect_fail = identity_from_string(*f.expect_fail);
  o.threads = f.threads;
  return o;
}

void emit(const std::string& text, const OutputFlags& f) {
  if (!f.out) {
    std::cout << text;
    return;
  }
  std::ofstream out(*f.out);
  if (!out) throw Error("cannot write '" + *f.out + "'");
  out << text;
  if (!out) throw Error("failed writing '" + *f.out + "'");
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact curvature identity checker"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  ModelFlags model;
  OutputFlags output;
  RunFlags run;
  run.threads = default_threads();

  CLI::App* inv = app.add_subcommand("invariants", "print the invariant table of a model");
  add_model_flags(inv, model);
  add_output_flags(inv, output);

  CLI::App* ver = app.add_subcommand("verify", "evaluate identity residuals on a model");
  add_model_flags(ver, model);
  add_run_flags(ver, run);
  add_output_flags(ver, output);

  RandomCheckOptions rc;
  rc.threads = run.threads;
  std::string rc_identity;
  CLI::App* rnd = app.add_subcommand("random-check", "evaluate an identity over seeded random tensors");
  rnd->add_option("--dim", rc.dim, "dimension")->required()->check(CLI::Range(2, Tensor::kMaxDim));
  rnd->add_option("--identity", rc_identity, "identity name")->required();
  rnd->add_option("--r", rc.copies, "number of curvature factors for patterson / weyl-patterson");
  rnd->add_option("-n", rc.trials, "number of trials")->check(CLI::Range(1, 1000000));
  rnd->add_option("--seed", rc.seed, "seed of the first trial; trial t uses seed + t");
  rnd->add_option("--terms", rc.terms, "Kulkarni-Nomizu terms per random tensor")->check(CLI::Range(1, 1000));
  rnd->add_option("--threads", rc.threads, "worker threads (default CURVIDENT_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  add_output_flags(rnd, output);

  std::string export_path;
  CLI::App* exp = app.add_subcommand("export", "write the verify report of a model as JSON");
  add_model_flags(exp, model);
  add_run_flags(exp, run);
  add_output_flags(exp, output, false);
  exp->add_option("path", export_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInput;
  }

  try {
    if (inv->parsed()) {
      const RunReport rep = run_invariants(resolve_flags(model));
      if (output.json) {
        Json j;
        j["model"] = model_to_json(rep.model);
        j["invariants"] = invariants_to_json(rep);
        emit(json_text(j), output);
      } else {
        emit(invariants_table(rep), output);
      }
      return kExitPass;
    }
    if (ver->parsed()) {
      const RunReport rep = run_verify(resolve_flags(model), verify_options(run));
      emit(output.json ? json_text(run_report_to_json(rep, output.timing)) : verify_table(rep, output.timing), output);
      return rep.pass ? kExitPass : kExitFail;
    }
    if (rnd->parsed()) {
      rc.identity = identity_from_string(rc_identity);
      const RandomCheckReport rep = run_random_check(rc);
      emit(output.json ? json_text(random_check_to_json(rep, output.timing)) : random_check_table(rep, output.timing),
           output);
      return rep.passed == rc.trials ? kExitPass : kExitFail;
    }
    if (exp->parsed()) {
      const RunReport rep = run_verify(resolve_flags(model), verify_options(run));
      output.out = export_path;
      emit(json_text(run_report_to_json(rep, output.timing)), output);
      std::cout << "wrote " << export_path << " (verdict " << (rep.pass ? "pass" : "fail") << ")\n";
      return kExitPass;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
