#include "mlsa/samplers.hpp"

#include <limits>
#include <stdexcept>

namespace mlsa {

BiasParam::BiasParam(std::int64_t k_) : k(k_) {
  if (k < 1) throw std::invalid_argument("BiasParam: inner sample count must be >= 1");
}

LevelLadder::LevelLadder(BiasParam h0_, int m_, int l_) : h0(h0_), m(m_), l(l_) {
  if (m < 2) throw std::invalid_argument("LevelLadder: geometric factor must be >= 2");
  if (l < 0) throw std::invalid_argument("LevelLadder: level count must be >= 0");
  std::int64_t n = h0.k;
  for (int i = 0; i < l; i++) {
    if (n > std::numeric_limits<std::int64_t>::max() / m)
      throw std::invalid_argument("LevelLadder: K*M^L overflows the cost counters");
    n *= m;
  }
}

std::int64_t LevelLadder::inner_count(int level) const {
  if (level < 0 || level > l)
    throw std::out_of_range("LevelLadder: level outside 0..L");
  std::int64_t n = h0.k;
  for (int i = 0; i < level; i++) n *= m;
  return n;
}

double sample_nested(const LossModel& model, BiasParam bias, RngStream& rng) {
  double outer = model.draw_outer(rng);
  double sum = model.payoff_sum(outer, bias.k, rng);
  return model.loss_from_mean_payoff(sum / static_cast<double>(bias.k));
}

std::pair<double, double> sample_coupled_pair(const LossModel& model,
                                              const LevelLadder& ladder,
                                              int level, RngStream& rng) {
  if (level < 1 || level > ladder.l)
    throw std::invalid_argument(
        "sample_coupled_pair: level must lie in 1..L (level 0 has no coarse twin)");
  std::int64_t n_coarse = ladder.inner_count(level - 1);
  std::int64_t n_fine = ladder.inner_count(level);
  std::int64_t n_rest = n_fine - n_coarse;

  double outer = model.draw_outer(rng);
  double coarse_mean = model.payoff_sum(outer, n_coarse, rng) / static_cast<double>(n_coarse);
  double rest_sum = model.payoff_sum(outer, n_rest, rng);
  double fine_mean = coarse_mean / static_cast<double>(ladder.m) +
                     rest_sum / static_cast<double>(n_fine);
  return {model.loss_from_mean_payoff(coarse_mean),
          model.loss_from_mean_payoff(fine_mean)};
}

}  // namespace mlsa
