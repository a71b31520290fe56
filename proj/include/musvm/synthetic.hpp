#pragma once

#include <cstdint>
#include <random>

#include "musvm/types.hpp"

namespace musvm {

/// L Gaussian classes. Class means sit on a circle of radius `separation` in
/// the first two coordinates (a line when d = 1); every coordinate gets
/// N(0, noise^2) noise, and coordinates [2, 2 + nuisance_dims) are further
/// scaled by `nuisance_scale`. Labels cycle 0, 1, ..., L-1.
struct GaussianSpec {
  Index n = 100;
  int num_classes = 3;
  Index dim = 2;
  double separation = 2.0;
  double noise = 1.0;
  Index nuisance_dims = 0;
  double nuisance_scale = 1.0;
};

Dataset sample_gaussian(const GaussianSpec& spec, std::mt19937_64& rng);

/// Each universum sample averages one randomly chosen training sample from
/// every class.
UniversumSet random_averaging(const Dataset& train, Index m, std::mt19937_64& rng);

/// Isotropic N(0, scale^2) universum.
UniversumSet gaussian_universum(Index m, Index dim, double scale, std::mt19937_64& rng);

/// Small random problem for oracle comparisons.
struct RandomInstance {
  Dataset train;
  UniversumSet universum;
  Hyperparams params;
};

struct RandomInstanceSpec {
  Index max_n = 15;
  int min_classes = 2;
  int max_classes = 4;
  Index max_m = 5;
  Index dim = 2;
  bool rbf = false;
};

RandomInstance random_instance(std::uint64_t seed, const RandomInstanceSpec& spec = {});

}  // namespace musvm
