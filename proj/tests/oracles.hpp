// Independent oracles for the metric tests. These stay deliberately naive:
// direct pair enumeration and brute-force scans, no shared code with the
// implementations they check.
#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "taxomatic/evaluation.hpp"
#include "taxomatic/types.hpp"

namespace oracles {

// Alpha via direct enumeration of within-unit value pairs: observed
// disagreement as the weighted average over unit pairs, expected from all
// cross pairs of the pooled values.
inline std::optional<double> brute_force_alpha(const taxomatic::eval::ReliabilityMatrix& m) {
  std::vector<std::vector<std::string>> unit_values(m.units.size());
  for (const auto& [cell, value] : m.values) {
    unit_values[cell.first].push_back(value);
  }
  std::vector<std::string> pooled;
  double observed_num = 0.0;
  double n = 0.0;
  for (const auto& values : unit_values) {
    const auto mu = values.size();
    if (mu < 2) continue;
    n += static_cast<double>(mu);
    for (const auto& v : values) pooled.push_back(v);
    for (std::size_t i = 0; i < mu; ++i) {
      for (std::size_t j = 0; j < mu; ++j) {
        if (i != j && values[i] != values[j]) {
          observed_num += 1.0 / static_cast<double>(mu - 1);
        }
      }
    }
  }
  if (pooled.empty()) return std::nullopt;
  double expected_num = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (i != j && pooled[i] != pooled[j]) expected_num += 1.0;
    }
  }
  const double observed = observed_num / n;
  const double expected = expected_num / (n * (n - 1.0));
  if (expected == 0.0) return std::nullopt;
  return 1.0 - observed / expected;
}

inline taxomatic::eval::ReliabilityMatrix random_matrix(std::mt19937_64& rng,
                                                        std::size_t observers,
                                                        std::size_t units,
                                                        double missing_fraction,
                                                        std::size_t categories = 2) {
  taxomatic::eval::ReliabilityMatrix m;
  for (std::size_t o = 0; o < observers; ++o) m.observers.push_back("obs" + std::to_string(o));
  for (std::size_t u = 0; u < units; ++u) m.units.push_back("unit" + std::to_string(u));
  std::uniform_real_distribution<double> miss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> cat(0, categories - 1);
  for (std::size_t u = 0; u < units; ++u) {
    for (std::size_t o = 0; o < observers; ++o) {
      if (miss(rng) < missing_fraction) continue;
      m.values[{u, o}] = "cat" + std::to_string(cat(rng));
    }
  }
  return m;
}

inline taxomatic::EmbeddingVector random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  taxomatic::EmbeddingVector v;
  v.values.resize(dim);
  for (auto& x : v.values) x = gauss(rng);
  return v;
}

}  // namespace oracles
