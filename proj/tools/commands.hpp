#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "reliefe/embed.hpp"
#include "reliefe/ranking.hpp"

namespace reliefe::cli {

inline constexpr int kManifestSchemaVersion = 1;

/// Entry point shared by the executable and the tests. argv[0] is the
/// program name. Returns the process exit code; diagnostics go to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

nlohmann::ordered_json to_json(const EmbeddingConfig& config);
nlohmann::ordered_json to_json(const RankingConfig& config);

/// `[{"feature": j, "weight": w_j, "rank": r}]` ordered by rank (1-based).
nlohmann::ordered_json ranking_json(const FeatureWeights& weights);
/// Inverse of ranking_json: weights indexed by feature.
FeatureWeights weights_from_json(const nlohmann::ordered_json& doc);

}  // namespace reliefe::cli
