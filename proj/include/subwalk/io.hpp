#pragma once

#include "subwalk/lattice.hpp"
#include "subwalk/levy_embed.hpp"
#include "subwalk/scaling.hpp"
#include "subwalk/subordination.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>

namespace subwalk {

/// Shortest round-trip decimal for a double; byte-stable across runs.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string to_csv(const LatticeDistribution& law);
std::string to_csv(const StepDistribution& sd);
std::string to_csv(const ChfEvaluation& chf);
std::string to_csv(const ConvergenceReport& rep);
std::string to_csv(const PathTable& path);
std::string to_csv(const TailBoundReport& rep);

nlohmann::json to_json(const LatticeDistribution& law);
nlohmann::json to_json(const StepDistribution& sd);
nlohmann::json to_json(const TripletComparison& cmp);
nlohmann::json to_json(const ConvergenceReport& rep);
nlohmann::json to_json(const TailBoundReport& rep);
nlohmann::json to_json(const RVEstimate& rv);

} // namespace subwalk
