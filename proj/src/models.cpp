#include "curvident/models.hpp"

#include <fstream>
#include <random>
#include <set>

#include "curvident/error.hpp"

namespace curvident {

namespace {

struct KindInfo {
  ModelKind kind;
  const char* name;
  std::vector<std::string> required;
};

const std::vector<KindInfo>& kind_table() {
  static const std::vector<KindInfo> table = {
      {ModelKind::constant_curvature, "constant_curvature", {"dim", "k"}},
      {ModelKind::product, "product", {}},
      {ModelKind::example_5d, "example_5d", {"k"}},
      {ModelKind::example_6d, "example_6d", {"k"}},
      {ModelKind::sl3_so3, "sl3_so3", {}},
      {ModelKind::nikolayevsky, "nikolayevsky", {"alpha", "beta"}},
      {ModelKind::explicit_components, "explicit", {"dim"}},
      {ModelKind::random_einstein, "random_einstein", {"dim", "seed", "terms"}},
  };
  return table;
}

const KindInfo& info(ModelKind kind) {
  for (const auto& k : kind_table()) {
    if (k.kind == kind) return k;
  }
  throw Error("unknown model kind");
}

/// Integer value of a rational Scalar parameter, range-checked.
std::int64_t integer_param(const ModelSpec& spec, const std::string& key, const std::string& where, std::int64_t lo,
                           std::int64_t hi) {
  const Scalar& v = spec.params.at(key);
  const std::string at = where + "/params/" + key;
  if (!v.is_rational()) throw SchemaError(at, "expected an integer");
  const mpq_class q = v.rat_part().to_mpq();
  if (q.get_den() != 1 || q < lo || q > hi) {
    throw SchemaError(at, "expected an integer in " + std::to_string(lo) + ".." + std::to_string(hi));
  }
  return q.get_num().get_si();
}

std::uint64_t seed_param(const ModelSpec& spec, const std::string& where) {
  const Scalar& v = spec.params.at("seed");
  const std::string at = where + "/params/seed";
  if (!v.is_rational()) throw SchemaError(at, "expected an unsigned 64-bit integer");
  const mpq_class q = v.rat_part().to_mpq();
  const mpz_class max = (mpz_class(1) << 64) - 1;
  if (q.get_den() != 1 || q < 0 || q.get_num() > max) throw SchemaError(at, "expected an unsigned 64-bit integer");
  const mpz_class n = q.get_num();
  const mpz_class hi = n >> 32;
  const mpz_class lo = n - (hi << 32);
  return (static_cast<std::uint64_t>(hi.get_ui()) << 32) | static_cast<std::uint64_t>(lo.get_ui());
}

Scalar seed_scalar(std::uint64_t seed) {
  mpz_class n(static_cast<unsigned long>(seed >> 32));
  n <<= 32;
  n += static_cast<unsigned long>(seed & 0xffffffffu);
  return Scalar(Rational(mpq_class(n)));
}

void check_spec_at(const ModelSpec& spec, const std::string& where) {
  const KindInfo& ki = info(spec.kind);
  std::set<std::string> allowed(ki.required.begin(), ki.required.end());
  if (spec.kind == ModelKind::random_einstein) {
    allowed.insert("k");
    allowed.insert("tau");
  }
  for (const auto& key : ki.required) {
    if (!spec.params.count(key)) throw SchemaError(where + "/params/" + key, "missing parameter for " + std::string(ki.name));
  }
  for (const auto& [key, value] : spec.params) {
    if (!allowed.count(key)) throw SchemaError(where + "/params/" + key, "unknown parameter for " + std::string(ki.name));
  }
  if (spec.params.count("dim")) integer_param(spec, "dim", where, 2, Tensor::kMaxDim);
  if (!spec.components.empty() && spec.kind != ModelKind::explicit_components) {
    throw SchemaError(where + "/components", "components are only allowed for explicit models");
  }
  if (!spec.factors.empty() && spec.kind != ModelKind::product) {
    throw SchemaError(where + "/factors", "factors are only allowed for product models");
  }
  switch (spec.kind) {
    case ModelKind::product: {
      if (spec.factors.size() != 2) throw SchemaError(where + "/factors", "product needs exactly two factors");
      for (std::size_t f = 0; f < 2; ++f) check_spec_at(spec.factors[f], where + "/factors/" + std::to_string(f));
      break;
    }
    case ModelKind::explicit_components: {
      if (spec.components.empty()) throw SchemaError(where + "/components", "explicit model requires components");
      const int dim = static_cast<int>(integer_param(spec, "dim", where, 2, Tensor::kMaxDim));
      for (std::size_t c = 0; c < spec.components.size(); ++c) {
        for (std::size_t k = 0; k < 4; ++k) {
          const int v = spec.components[c].idx[k];
          if (v < 0 || v >= dim) {
            throw SchemaError(where + "/components/" + std::to_string(c) + "/idx/" + std::to_string(k),
                              "index must be in 1.." + std::to_string(dim));
          }
        }
      }
      break;
    }
    case ModelKind::random_einstein: {
      integer_param(spec, "dim", where, 4, Tensor::kMaxDim);
      integer_param(spec, "terms", where, 1, 1000);
      seed_param(spec, where);
      if (spec.params.count("k") == spec.params.count("tau")) {
        throw SchemaError(where + "/params", "random_einstein needs exactly one of k, tau");
      }
      break;
    }
    default:
      break;
  }
}

void set_orbit(Tensor& r, const std::array<int, 4>& c, const Scalar& v, std::vector<char>& assigned) {
  const int i = c[0], j = c[1], k = c[2], l = c[3];
  const std::array<std::pair<std::array<int, 4>, int>, 8> orbit = {{
      {{i, j, k, l}, 1},
      {{j, i, k, l}, -1},
      {{i, j, l, k}, -1},
      {{j, i, l, k}, 1},
      {{k, l, i, j}, 1},
      {{l, k, i, j}, -1},
      {{k, l, j, i}, -1},
      {{l, k, j, i}, 1},
  }};
  for (const auto& [idx, sign] : orbit) {
    const std::size_t off = r.offset({idx[0], idx[1], idx[2], idx[3]});
    const Scalar val = sign > 0 ? v : -v;
    if (assigned[off] && !(r[off] == val)) {
      throw ValidationError("component (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                            std::to_string(k + 1) + "," + std::to_string(l + 1) +
                            ") conflicts with another listed component under the curvature symmetries");
    }
    r[off] = val;
    assigned[off] = 1;
  }
}

ComponentEntry entry(int i, int j, int k, int l, Scalar v) { return {{i - 1, j - 1, k - 1, l - 1}, std::move(v)}; }

std::vector<ComponentEntry> nikolayevsky_components(const Scalar& a, const Scalar& b) {
  const Scalar s3b = Scalar::sqrt3() * b;
  return {
      entry(1, 2, 1, 2, a - b),           entry(1, 3, 1, 3, a - b),
      entry(2, 3, 2, 3, a - b),           entry(2, 4, 2, 4, a - b),
      entry(3, 4, 3, 4, a - b),           entry(1, 4, 1, 4, a - Scalar(4) * b),
      entry(1, 5, 1, 5, a),               entry(4, 5, 4, 5, a),
      entry(2, 5, 2, 5, a - Scalar(3) * b), entry(3, 5, 3, 5, a - Scalar(3) * b),
      entry(1, 2, 3, 4, b),               entry(1, 2, 3, 5, s3b),
      entry(1, 3, 2, 4, -b),              entry(1, 3, 2, 5, s3b),
      entry(1, 4, 2, 3, Scalar(-2) * b),  entry(2, 4, 2, 5, s3b),
      entry(3, 4, 3, 5, -s3b),
  };
}

std::vector<ComponentEntry> sl3_so3_components() {
  const Scalar half(Rational(-1, 2));
  const Scalar s3half(Rational(0), Rational(1, 2));
  return {
      entry(1, 2, 2, 1, half),          entry(1, 3, 3, 1, half),
      entry(2, 3, 3, 2, half),          entry(2, 4, 4, 2, half),
      entry(3, 4, 4, 3, half),          entry(1, 4, 4, 1, Scalar(-2)),
      entry(1, 5, 5, 1, Scalar(0)),     entry(4, 5, 5, 4, Scalar(0)),
      entry(2, 5, 5, 2, Scalar(Rational(-3, 2))), entry(3, 5, 5, 3, Scalar(Rational(-3, 2))),
      entry(1, 2, 3, 4, half),          entry(1, 2, 3, 5, -s3half),
      entry(1, 3, 2, 4, Scalar(Rational(1, 2))), entry(1, 3, 2, 5, -s3half),
      entry(1, 4, 2, 3, Scalar(1)),     entry(2, 4, 2, 5, -s3half),
      entry(3, 4, 3, 5, s3half),
  };
}

}  // namespace

std::string to_string(ModelKind kind) { return info(kind).name; }

ModelKind model_kind_from_string(const std::string& name) {
  for (const auto& k : kind_table()) {
    if (name == k.name) return k.kind;
  }
  throw SchemaError("/kind", "unknown model kind '" + name + "'");
}

ModelSpec ModelSpec::constant(int dim, const Scalar& k) {
  ModelSpec s;
  s.kind = ModelKind::constant_curvature;
  s.params = {{"dim", Scalar(dim)}, {"k", k}};
  return s;
}

ModelSpec ModelSpec::product_of(ModelSpec a, ModelSpec b) {
  ModelSpec s;
  s.kind = ModelKind::product;
  s.factors = {std::move(a), std::move(b)};
  return s;
}

ModelSpec ModelSpec::example5d(const Scalar& k) {
  ModelSpec s;
  s.kind = ModelKind::example_5d;
  s.params = {{"k", k}};
  return s;
}

ModelSpec ModelSpec::example6d(const Scalar& k) {
  ModelSpec s;
  s.kind = ModelKind::example_6d;
  s.params = {{"k", k}};
  return s;
}

ModelSpec ModelSpec::sl3so3() {
  ModelSpec s;
  s.kind = ModelKind::sl3_so3;
  return s;
}

ModelSpec ModelSpec::nikolayevsky(const Scalar& alpha, const Scalar& beta) {
  ModelSpec s;
  s.kind = ModelKind::nikolayevsky;
  s.params = {{"alpha", alpha}, {"beta", beta}};
  return s;
}

ModelSpec ModelSpec::explicit_list(int dim, std::vector<ComponentEntry> components) {
  ModelSpec s;
  s.kind = ModelKind::explicit_components;
  s.params = {{"dim", Scalar(dim)}};
  s.components = std::move(components);
  return s;
}

ModelSpec ModelSpec::random_einstein(int dim, std::uint64_t seed, int terms, const Scalar& k) {
  ModelSpec s;
  s.kind = ModelKind::random_einstein;
  s.params = {{"dim", Scalar(dim)}, {"seed", seed_scalar(seed)}, {"terms", Scalar(terms)}, {"k", k}};
  return s;
}

void check_spec(const ModelSpec& spec) { check_spec_at(spec, ""); }

CurvatureTensor product(const CurvatureTensor& a, const CurvatureTensor& b) {
  const int da = a.dim();
  const int db = b.dim();
  if (da + db > Tensor::kMaxDim) throw PreconditionError("product dimension exceeds 6");
  Tensor r(da + db, 4);
  for (std::size_t i = 0; i < a.tensor().size(); ++i) {
    if (a.tensor()[i].is_zero()) continue;
    const std::vector<int> idx = a.tensor().multi_index(i);
    r.at(idx) = a.tensor()[i];
  }
  for (std::size_t i = 0; i < b.tensor().size(); ++i) {
    if (b.tensor()[i].is_zero()) continue;
    std::vector<int> idx = b.tensor().multi_index(i);
    for (int& v : idx) v += da;
    r.at(idx) = b.tensor()[i];
  }
  return validate_curvature(std::move(r));
}

CurvatureTensor from_components(int dim, const std::vector<ComponentEntry>& components) {
  Tensor r(dim, 4);
  std::vector<char> assigned(r.size(), 0);
  for (const auto& c : components) {
    for (int v : c.idx) {
      if (v < 0 || v >= dim) throw ValidationError("component index outside 1.." + std::to_string(dim));
    }
    set_orbit(r, c.idx, c.val, assigned);
  }
  return validate_curvature(std::move(r));
}

Tensor kulkarni_nomizu_square(const Tensor& h) {
  if (h.rank() != 2) throw ShapeError("Kulkarni-Nomizu square needs a rank-2 tensor");
  const int n = h.dim();
  Tensor r(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar v = h.at({i, l}) * h.at({j, k}) - h.at({i, k}) * h.at({j, l});
          if (!v.is_zero()) r.at({i, j, k, l}) = Scalar(2) * v;
        }
  return r;
}

CurvatureTensor random_curvature(int dim, std::uint64_t seed, int n_terms) {
  if (dim < Tensor::kMinDim || dim > Tensor::kMaxDim) throw PreconditionError("random_curvature: dimension outside 2..6");
  if (n_terms < 1) throw PreconditionError("random_curvature: need at least one term");
  std::mt19937_64 gen(seed);
  Tensor r(dim, 4);
  for (int t = 0; t < n_terms; ++t) {
    const bool negative = (gen() & 1u) != 0;
    Tensor h(dim, 2);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const Scalar v(static_cast<std::int64_t>(gen() % 7) - 3);
        h.at({i, j}) = v;
        h.at({j, i}) = v;
      }
    const Tensor kn = kulkarni_nomizu_square(h);
    if (negative) {
      r -= kn;
    } else {
      r += kn;
    }
  }
  return validate_curvature(std::move(r));
}

CurvatureTensor einsteinize(const CurvatureTensor& r, const Scalar& k) {
  if (r.dim() < 4) throw PreconditionError("einsteinize requires dimension >= 4");
  Tensor out = weyl(r).tensor();
  out += constant_curvature_tensor(r.dim(), k);
  return validate_curvature(std::move(out));
}

CurvatureTensor build(const ModelSpec& spec) {
  check_spec(spec);
  auto param = [&](const char* key) -> const Scalar& { return spec.params.at(key); };
  auto dim_param = [&]() { return static_cast<int>(integer_param(spec, "dim", "", 2, Tensor::kMaxDim)); };
  switch (spec.kind) {
    case ModelKind::constant_curvature:
      return validate_curvature(constant_curvature_tensor(dim_param(), param("k")));
    case ModelKind::product:
      return product(build(spec.factors[0]), build(spec.factors[1]));
    case ModelKind::example_5d:
      return build(ModelSpec::product_of(ModelSpec::constant(3, param("k")), ModelSpec::constant(2, Scalar(2) * param("k"))));
    case ModelKind::example_6d:
      return build(ModelSpec::product_of(ModelSpec::constant(3, param("k")), ModelSpec::constant(3, param("k"))));
    case ModelKind::sl3_so3:
      return from_components(5, sl3_so3_components());
    case ModelKind::nikolayevsky:
      return from_components(5, nikolayevsky_components(param("alpha"), param("beta")));
    case ModelKind::explicit_components:
      return from_components(dim_param(), spec.components);
    case ModelKind::random_einstein: {
      const int dim = dim_param();
      const int terms = static_cast<int>(integer_param(spec, "terms", "", 1, 1000));
      const CurvatureTensor raw = random_curvature(dim, seed_param(spec, ""), terms);
      Scalar k = spec.params.count("k") ? param("k") : param("tau") / Scalar(dim * (dim - 1));
      return einsteinize(raw, k);
    }
  }
  throw Error("unhandled model kind");
}

Json model_to_json(const ModelSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  Json params = Json::object();
  for (const auto& [key, value] : spec.params) params[key] = value.str();
  j["params"] = std::move(params);
  if (!spec.components.empty()) {
    Json comps = Json::array();
    for (const auto& c : spec.components) {
      comps.push_back(Json{{"idx", {c.idx[0] + 1, c.idx[1] + 1, c.idx[2] + 1, c.idx[3] + 1}}, {"val", c.val.str()}});
    }
    j["components"] = std::move(comps);
  }
  if (!spec.factors.empty()) {
    Json factors = Json::array();
    for (const auto& f : spec.factors) factors.push_back(model_to_json(f));
    j["factors"] = std::move(factors);
  }
  return j;
}

ModelSpec model_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where.empty() ? "/" : where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "params" && key != "components" && key != "factors") {
      throw SchemaError(where + "/" + key, "unknown field");
    }
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw SchemaError(where + "/kind", "missing or not a string");
  ModelSpec spec;
  try {
    spec.kind = model_kind_from_string(j["kind"].get<std::string>());
  } catch (const SchemaError&) {
    throw SchemaError(where + "/kind", "unknown model kind '" + j["kind"].get<std::string>() + "'");
  }
  if (j.contains("params")) {
    const Json& params = j["params"];
    if (!params.is_object()) throw SchemaError(where + "/params", "expected an object");
    for (const auto& [key, value] : params.items()) {
      spec.params[key] = scalar_from_json(value, where + "/params/" + key);
    }
  }
  if (j.contains("components")) {
    const Json& comps = j["components"];
    if (!comps.is_array()) throw SchemaError(where + "/components", "expected an array");
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::string at = where + "/components/" + std::to_string(c);
      const Json& e = comps[c];
      if (!e.is_object() || !e.contains("idx") || !e.contains("val")) {
        throw SchemaError(at, "expected {\"idx\": [i,j,k,l], \"val\": \"...\"}");
      }
      if (!e["idx"].is_array() || e["idx"].size() != 4) throw SchemaError(at + "/idx", "expected four indices");
      ComponentEntry entry;
      for (std::size_t k = 0; k < 4; ++k) {
        if (!e["idx"][k].is_number_integer()) throw SchemaError(at + "/idx/" + std::to_string(k), "expected an integer");
        entry.idx[k] = e["idx"][k].get<int>() - 1;
      }
      entry.val = scalar_from_json(e["val"], at + "/val");
      spec.components.push_back(entry);
    }
  }
  if (j.contains("factors")) {
    const Json& factors = j["factors"];
    if (!factors.is_array()) throw SchemaError(where + "/factors", "expected an array");
    for (std::size_t f = 0; f < factors.size(); ++f) {
      spec.factors.push_back(model_from_json(factors[f], where + "/factors/" + std::to_string(f)));
    }
  }
  check_spec_at(spec, where);
  return spec;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return model_from_json(j);
}

void save_model(const ModelSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << model_to_json(spec).dump(2) << '\n';
  if (!out) throw Error("failed writing model file '" + path + "'");
}

}  // namespace curvident
