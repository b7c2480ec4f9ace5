#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curvident/curvature.hpp"
#include "curvident/json_io.hpp"

namespace curvident {

enum class ModelKind {
  constant_curvature,
  product,
  example_5d,
  example_6d,
  sl3_so3,
  nikolayevsky,
  explicit_components,
  random_einstein,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// One independent component, 0-based indices.
struct ComponentEntry {
  std::array<int, 4> idx{};
  Scalar val;
  friend bool operator==(const ComponentEntry&, const ComponentEntry&) = default;
};

/// Serializable model description.
///
/// Parameters by kind:
///   constant_curvature  dim, k
///   product             factors (two nested specs)
///   example_5d          k
///   example_6d          k
///   sl3_so3             (none)
///   nikolayevsky        alpha, beta
///   explicit            dim, components
///   random_einstein     dim, seed, terms, and either k or tau
struct ModelSpec {
  ModelKind kind = ModelKind::constant_curvature;
  std::map<std::string, Scalar> params;
  std::vector<ComponentEntry> components;
  std::vector<ModelSpec> factors;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

  static ModelSpec constant(int dim, const Scalar& k);
  static ModelSpec flat(int dim) { return constant(dim, Scalar(0)); }
  static ModelSpec product_of(ModelSpec a, ModelSpec b);
  static ModelSpec example5d(const Scalar& k);
  static ModelSpec example6d(const Scalar& k);
  static ModelSpec sl3so3();
  static ModelSpec nikolayevsky(const Scalar& alpha, const Scalar& beta);
  static ModelSpec explicit_list(int dim, std::vector<ComponentEntry> components);
  static ModelSpec random_einstein(int dim, std::uint64_t seed, int terms, const Scalar& k);
};

/// Throws SchemaError (with a JSON pointer into the spec's JSON form) when
/// parameters are missing, unknown or out of range.
void check_spec(const ModelSpec& spec);

CurvatureTensor build(const ModelSpec& spec);

/// Block-diagonal product: a on indices 0..dim(a)-1, b on the rest.
CurvatureTensor product(const CurvatureTensor& a, const CurvatureTensor& b);

/// Expands independent components under R_ijkl = -R_jikl = -R_ijlk = R_klij,
/// then validates (first Bianchi is checked, not imposed).
CurvatureTensor from_components(int dim, const std::vector<ComponentEntry>& components);

/// (h KN h)_ijkl = 2 (h_il h_jk - h_ik h_jl) for a symmetric matrix h.
Tensor kulkarni_nomizu_square(const Tensor& h);

/// Random algebraic curvature tensor sum_t eps_t (h_t KN h_t).
///
/// Generator: std::mt19937_64 seeded with `seed`. For each term, one draw
/// gives the sign (eps = -1 when the low bit is set), then the upper
/// triangle of h_t in row-major order takes one draw per entry,
/// h_ij = (draw mod 7) - 3.
CurvatureTensor random_curvature(int dim, std::uint64_t seed, int n_terms);

/// weyl(R) + k * (constant curvature 1); Einstein with rho = (m-1) k g.
CurvatureTensor einsteinize(const CurvatureTensor& r, const Scalar& k);

Json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const Json& j, const std::string& where = "");

ModelSpec load_model(const std::string& path);
void save_model(const ModelSpec& spec, const std::string& path);

}  // namespace curvident
