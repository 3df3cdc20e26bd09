#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace robustmean {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using MaskVector = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// The only random source used by the library. Every randomized operation
/// takes one by reference, so results are a pure function of the seed.
using Rng = std::mt19937_64;

}  // namespace robustmean
