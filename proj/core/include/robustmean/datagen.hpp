#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "robustmean/dataset.hpp"
#include "robustmean/structure.hpp"
#include "robustmean/types.hpp"

namespace robustmean {

enum class LatentKind { gaussian, uniform, exponential };
enum class StructureKind { block_diagonal, dense_random, identity, explicit_matrix };

std::string_view to_string(LatentKind kind) noexcept;
std::string_view to_string(StructureKind kind) noexcept;
LatentKind parse_latent_kind(std::string_view text);
StructureKind parse_structure_kind(std::string_view text);

/// Distribution of the latent vector z (length r).
///   gaussian     mean + scale .* N(0, 1)
///   uniform      U[mean - scale, mean + scale]
///   exponential  mean + Exp(rate 1/scale) - scale, so E[z] = mean
struct LatentSpec {
  LatentKind kind = LatentKind::gaussian;
  Index r = 1;
  Vector mean;   // empty: zeros
  Vector scale;  // empty: ones

  /// Throws Errc::config on wrong lengths or a nonpositive scale.
  void validate() const;
  Vector mean_or_default() const;
  Vector scale_or_default() const;
  /// Cov(z): diagonal with scale^2 (gaussian, exponential) or scale^2 / 3 (uniform).
  Matrix covariance() const;
};

struct StructureSpec {
  StructureKind kind = StructureKind::block_diagonal;
  Index n = 16;
  Index r = 8;
  /// (rows, cols) of each diagonal block; summing to (n, r).
  std::vector<std::pair<Index, Index>> blocks{{8, 4}, {8, 4}};
  std::uint64_t seed = 0;
  std::optional<Matrix> explicit_entries;

  /// Throws Errc::config when the fields are inconsistent.
  void validate() const;
};

/// Structure drawn from `rng`: standard-normal blocks or dense entries,
/// the identity, or the explicit matrix.
StructureMatrix gen_structure(const StructureSpec& spec, Rng& rng);
/// Same, seeded from spec.seed.
StructureMatrix gen_structure(const StructureSpec& spec);

/// N x r matrix of latent draws, one row per sample.
Matrix gen_latents(const LatentSpec& spec, Index N, Rng& rng);

/// Row i is A z_i; nothing is masked.
Dataset gen_dataset(const StructureMatrix& a, const Matrix& z);

/// Population mean A * mean.
Vector true_mean(const StructureMatrix& a, const LatentSpec& spec);

/// Population covariance A Cov(z) A^T.
Matrix population_covariance(const StructureMatrix& a, const LatentSpec& spec);

}  // namespace robustmean
