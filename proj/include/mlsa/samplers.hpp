#pragma once

#include <cstdint>
#include <utility>

#include "mlsa/models.hpp"
#include "mlsa/rng.hpp"

namespace mlsa {

// Inner-sample count K; the induced bias parameter is h = 1/K.
struct BiasParam {
  std::int64_t k;

  explicit BiasParam(std::int64_t k_);

  double h() const { return 1.0 / static_cast<double>(k); }
};

// Geometric bias ladder h_l = h0 / M^l for l = 0..L.
struct LevelLadder {
  BiasParam h0;
  int m;
  int l;

  LevelLadder(BiasParam h0_, int m_, int l_);

  // Inner samples at level `level`: K * M^level.
  std::int64_t inner_count(int level) const;
  double h(int level) const { return 1.0 / static_cast<double>(inner_count(level)); }
};

// One draw of X_h: a fresh outer factor and the mean of K inner payoffs.
// Consumes exactly 1 outer + K inner draws from `rng`.
double sample_nested(const LossModel& model, BiasParam bias, RngStream& rng);

// One coupled draw (X_{h_{l-1}}, X_{h_l}) sharing the outer factor and the
// coarse inner draws; the fine value is built from the coarse mean plus the
// remaining K*M^(l-1)*(M-1) payoffs, never by re-averaging the full set.
// Requires 1 <= level <= L; consumes 1 outer + K*M^level inner draws.
std::pair<double, double> sample_coupled_pair(const LossModel& model,
                                              const LevelLadder& ladder,
                                              int level, RngStream& rng);

}  // namespace mlsa
