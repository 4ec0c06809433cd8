#pragma once

#include <cmath>
#include <string>

#include "disclin/errors.hpp"

namespace disclin {

enum class Model { kFvk, kPlate };

inline const char* to_string(Model m) {
  return m == Model::kFvk ? "fvk" : "plate";
}

inline Model model_from_string(const std::string& s) {
  if (s == "fvk") return Model::kFvk;
  if (s == "plate") return Model::kPlate;
  throw UsageError("unknown model '" + s + "' (expected 'fvk' or 'plate')");
}

// Physical parameters of one experiment: sheet thickness h, disclination
// deficit Delta, and which energy is evaluated.
struct Params {
  double h = 0.05;
  double delta = 0.5;
  Model model = Model::kFvk;

  void validate() const {
    if (!(h > 0.0) || !(h < 1.0))
      throw UsageError("h must lie in (0,1), got " + std::to_string(h));
    if (!(delta > 0.0) || !(delta < 1.0))
      throw UsageError("delta must lie in (0,1), got " + std::to_string(delta));
  }

  // sqrt(1 - Delta^2), the sector opening factor.
  double gamma() const { return std::sqrt(1.0 - delta * delta); }
};

}  // namespace disclin
