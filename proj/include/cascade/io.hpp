#pragma once

// Serialization: spectral fields to/from JSON documents.
//
// Mode-list form (written by field_to_json; "sign": -1 entries are accepted
// on input and folded through the reality constraint):
//   { "type": "modes", "n_max": 2,
//     "modes": [ {"shell":0, "kind":"K", "permutation":0, "sign":1,
//                 "re":0.0, "im":1.0}, ... ] }
// Shell-coefficient form:
//   { "type": "psi", "psi": [1.0, 0.5, ...] }

#include <json.hpp>

#include "cascade/field.hpp"

namespace cascade {

nlohmann::json field_to_json(const SpectralField& u);

// Accepts both forms above; throws std::invalid_argument on malformed input.
SpectralField field_from_json(const nlohmann::json& j);

}  // namespace cascade
