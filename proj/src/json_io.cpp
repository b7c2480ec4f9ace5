#include "curvident/json_io.hpp"

#include <set>

#include "curvident/error.hpp"

namespace curvident {

Json tensor_to_json(const Tensor& t) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].is_zero()) continue;
    std::vector<int> idx = t.multi_index(i);
    for (int& v : idx) ++v;
    entries.push_back(Json{{"idx", idx}, {"val", t[i].str()}});
  }
  return Json{{"dim", t.dim()}, {"rank", t.rank()}, {"entries", std::move(entries)}};
}

Scalar scalar_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Scalar(j.get<std::int64_t>());
  if (!j.is_string()) throw SchemaError(where, "expected a scalar string");
  try {
    return Scalar::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw SchemaError(where, e.what());
  }
}

namespace {

int int_field(const Json& j, const char* key, const std::string& where) {
  const std::string at = where + "/" + key;
  if (!j.contains(key)) throw SchemaError(at, "missing field");
  if (!j[key].is_number_integer()) throw SchemaError(at, "expected an integer");
  return j[key].get<int>();
}

}  // namespace

Tensor tensor_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  const int dim = int_field(j, "dim", where);
  const int rank = int_field(j, "rank", where);
  if (dim < Tensor::kMinDim || dim > Tensor::kMaxDim) throw SchemaError(where + "/dim", "dimension outside 2..6");
  if (rank < 0 || rank > Tensor::kMaxRank) throw SchemaError(where + "/rank", "rank outside 0..8");
  Tensor t(dim, rank);
  if (!j.contains("entries")) return t;
  const Json& entries = j["entries"];
  if (!entries.is_array()) throw SchemaError(where + "/entries", "expected an array");
  std::set<std::size_t> seen;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string at = where + "/entries/" + std::to_string(e);
    const Json& entry = entries[e];
    if (!entry.is_object() || !entry.contains("idx") || !entry.contains("val")) {
      throw SchemaError(at, "expected {\"idx\": [...], \"val\": \"...\"}");
    }
    const Json& idx = entry["idx"];
    if (!idx.is_array() || static_cast<int>(idx.size()) != rank) {
      throw SchemaError(at + "/idx", "expected " + std::to_string(rank) + " indices");
    }
    std::vector<int> zero_based;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!idx[k].is_number_integer() || idx[k].get<int>() < 1 || idx[k].get<int>() > dim) {
        throw SchemaError(at + "/idx/" + std::to_string(k), "index must be an integer in 1.." + std::to_string(dim));
      }
      zero_based.push_back(idx[k].get<int>() - 1);
    }
    const std::size_t off = t.offset(zero_based);
    if (!seen.insert(off).second) throw SchemaError(at + "/idx", "duplicate index tuple");
    t[off] = scalar_from_json(entry["val"], at + "/val");
  }
  return t;
}

Json matrix_to_json(const Tensor& t) {
  if (t.rank() != 2) throw ShapeError("matrix_to_json requires rank 2");
  Json rows = Json::array();
  for (int i = 0; i < t.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < t.dim(); ++j) row.push_back(t.at({i, j}).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace curvident
