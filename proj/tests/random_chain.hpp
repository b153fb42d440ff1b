#pragma once

// Random Bailey chains over the built-in seeds, for the transform soundness property.

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nahm/bailey.hpp"

namespace chains {

struct Drawn {
  std::string text;
  nahm::BaileyPair pair;
};

inline nahm::Monomial mono(int sign, std::int64_t quarter_units) {
  return nahm::Monomial(sign, nahm::QExponent(quarter_units, nahm::kDefaultDenom));
}

inline nahm::TransformStep draw_step(std::mt19937& rng) {
  using K = nahm::TransformStep::Kind;
  static const std::vector<nahm::Monomial> rhos = {mono(-1, 0), mono(-1, 2), mono(1, -4), mono(-1, 4)};
  static const std::vector<nahm::Monomial> bs = {mono(-1, 0), mono(-1, 2), mono(1, 2)};
  auto pick = [&](const std::vector<nahm::Monomial>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return {K::S1, {}};
    case 1: return {K::S3, {}};
    case 2: return {K::S5, {}};
    case 3: return {K::General, {pick(rhos), pick(rhos)}};
    default: return {K::DJK, {pick(bs)}};
  }
}

/// A seed and up to max_len steps; steps the current pair cannot take are redrawn.
inline Drawn draw_chain(std::mt19937& rng, int max_len) {
  static const std::vector<std::string> seeds = {"G1", "G2", "G3", "G1star"};
  const std::string seed = seeds[std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng)];
  Drawn d{seed, nahm::builtin_pair(seed)};
  const int len = std::uniform_int_distribution<int>(1, max_len)(rng);
  for (int i = 0; i < len; ++i) {
    for (int attempt = 0;; ++attempt) {
      const nahm::TransformStep t = draw_step(rng);
      try {
        d.pair = nahm::apply_transform(d.pair, t);
        d.text += " |> " + t.str();
        break;
      } catch (const std::invalid_argument&) {
        if (attempt > 20) throw;
      } catch (const std::domain_error&) {
        if (attempt > 20) throw;
      }
    }
  }
  return d;
}

}  // namespace chains
