#pragma once

#include <string>

#include <json.hpp>

#include "curvident/tensor.hpp"

namespace curvident {

using Json = nlohmann::ordered_json;

/// {"dim": n, "rank": r, "entries": [{"idx": [1-based...], "val": "..."}]}
/// with zero components omitted, in row-major order.
Json tensor_to_json(const Tensor& t);

/// Inverse of tensor_to_json. Omitted entries are zero; a repeated idx is an
/// error. `where` is the JSON pointer of `j`, used in diagnostics.
Tensor tensor_from_json(const Json& j, const std::string& where = "");

/// Reads a Scalar from a JSON string (or integer) value.
Scalar scalar_from_json(const Json& j, const std::string& where);

/// Dense rank-2 tensor as a list of rows of Scalar strings.
Json matrix_to_json(const Tensor& t);

}  // namespace curvident
