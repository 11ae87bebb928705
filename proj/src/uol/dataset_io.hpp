#pragma once

#include <span>
#include <string>
#include <vector>

#include "uol/synth_data.hpp"

namespace uol {

// JSON Lines, one instance per line with keys id, features, mean_score,
// rating_variance, true_score, ratings. Doubles are written shortest
// round-trip, so save/load is lossless.
void save_dataset(const std::string& path, std::span<const RatedInstance> instances);

// Validates every line: scores and ratings in range, mean and population
// variance consistent with the ratings. Errors carry 1-based line numbers.
std::vector<RatedInstance> load_dataset(const std::string& path);

}  // namespace uol
