#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nic/info_core.hpp"

namespace nic {

enum class ScoreMethod { closed_form, lower_bound, plug_in, symmetric_estimate };

std::string_view to_string(ScoreMethod m);

/// Interval on an information score. `extremum_search` is set when the
/// success-probability interval reached below 1/2 and the endpoints had to be
/// found by minimizing/maximizing 1 - h over it instead of mapping endpoints.
struct ScoreInterval {
  Bits lo = 0.0;
  Bits hi = 0.0;
  double level = 0.95;
  bool extremum_search = false;

  Bits half_width() const { return 0.5 * (hi - lo); }
  bool contains(Bits x) const { return lo <= x && x <= hi; }
};

/// Information score tagged with the method that produced it.
struct ScoreReport {
  Bits score = 0.0;
  ScoreMethod method = ScoreMethod::closed_form;
  std::map<std::string, double> params;
  std::optional<ScoreInterval> interval;
};

void to_json(nlohmann::json& j, const ScoreInterval& i);
void to_json(nlohmann::json& j, const ScoreReport& r);

}  // namespace nic
