#pragma once

#include "cfreq/spectrum.hpp"
#include "cfreq/sweep.hpp"

#include <json.hpp>

#include <string>

namespace cfreq {

[[nodiscard]] nlohmann::ordered_json to_json(const LinearDelaySystem& sys);
[[nodiscard]] nlohmann::ordered_json to_json(const Discretization& g);
[[nodiscard]] nlohmann::ordered_json to_json(const Spectrum& spec);
/// Timings are included only when asked, so equal configs give equal reports.
[[nodiscard]] nlohmann::ordered_json to_json(const FrequencySweepReport& rep, bool timings = false);
[[nodiscard]] nlohmann::ordered_json to_json(const ConvergenceReport& rep);
[[nodiscard]] nlohmann::ordered_json to_json(const std::vector<ScanPoint>& scan);

/// Header omega,alpha,threshold; %.17g.
void write_curve_csv(const std::string& path, const FrequencySweepReport& rep);

void write_text(const std::string& path, const std::string& text);

}  // namespace cfreq
