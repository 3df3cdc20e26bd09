#include "robustmean/datagen.hpp"

#include <string>

#include "robustmean/error.hpp"

namespace robustmean {

std::string_view to_string(LatentKind kind) noexcept {
  switch (kind) {
    case LatentKind::gaussian: return "gaussian";
    case LatentKind::uniform: return "uniform";
    case LatentKind::exponential: return "exponential";
  }
  return "unknown";
}

std::string_view to_string(StructureKind kind) noexcept {
  switch (kind) {
    case StructureKind::block_diagonal: return "block_diagonal";
    case StructureKind::dense_random: return "dense_random";
    case StructureKind::identity: return "identity";
    case StructureKind::explicit_matrix: return "explicit";
  }
  return "unknown";
}

LatentKind parse_latent_kind(std::string_view text) {
  for (auto k : {LatentKind::gaussian, LatentKind::uniform, LatentKind::exponential}) {
    if (text == to_string(k)) return k;
  }
  throw Error(Errc::config, "unknown latent kind '" + std::string(text) + "'");
}

StructureKind parse_structure_kind(std::string_view text) {
  for (auto k : {StructureKind::block_diagonal, StructureKind::dense_random, StructureKind::identity,
                 StructureKind::explicit_matrix}) {
    if (text == to_string(k)) return k;
  }
  throw Error(Errc::config, "unknown structure kind '" + std::string(text) + "'");
}

void LatentSpec::validate() const {
  if (r < 1) throw Error(Errc::config, "latent dimension r must be >= 1");
  if (mean.size() != 0 && mean.size() != r) throw Error(Errc::config, "latent mean must have r entries");
  if (scale.size() != 0 && scale.size() != r) throw Error(Errc::config, "latent scale must have r entries");
  if (scale.size() != 0 && !(scale.array() > 0.0).all()) {
    throw Error(Errc::config, "latent scale entries must be strictly positive");
  }
}

Vector LatentSpec::mean_or_default() const { return mean.size() == 0 ? Vector::Zero(r) : mean; }

Vector LatentSpec::scale_or_default() const { return scale.size() == 0 ? Vector::Ones(r) : scale; }

Matrix LatentSpec::covariance() const {
  Vector var = scale_or_default().array().square();
  if (kind == LatentKind::uniform) var /= 3.0;
  return var.asDiagonal();
}

void StructureSpec::validate() const {
  if (n < 1 || r < 1) throw Error(Errc::config, "structure needs n >= 1 and r >= 1");
  switch (kind) {
    case StructureKind::block_diagonal: {
      if (blocks.empty()) throw Error(Errc::config, "block_diagonal needs at least one block");
      Index rows = 0;
      Index cols = 0;
      for (const auto& [br, bc] : blocks) {
        if (br < 1 || bc < 1) throw Error(Errc::config, "block dimensions must be >= 1");
        rows += br;
        cols += bc;
      }
      if (rows != n || cols != r) {
        throw Error(Errc::config, "blocks sum to " + std::to_string(rows) + "x" + std::to_string(cols) +
                                      ", expected " + std::to_string(n) + "x" + std::to_string(r));
      }
      break;
    }
    case StructureKind::dense_random: break;
    case StructureKind::identity:
      if (n != r) throw Error(Errc::config, "identity structure needs n == r");
      break;
    case StructureKind::explicit_matrix:
      if (!explicit_entries) throw Error(Errc::config, "explicit structure needs a matrix");
      if (explicit_entries->rows() != n || explicit_entries->cols() != r) {
        throw Error(Errc::config, "explicit matrix shape differs from (n, r)");
      }
      break;
  }
}

StructureMatrix gen_structure(const StructureSpec& spec, Rng& rng) {
  spec.validate();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a = Matrix::Zero(spec.n, spec.r);
  switch (spec.kind) {
    case StructureKind::block_diagonal: {
      Index row0 = 0;
      Index col0 = 0;
      for (const auto& [br, bc] : spec.blocks) {
        for (Index i = 0; i < br; ++i) {
          for (Index j = 0; j < bc; ++j) a(row0 + i, col0 + j) = gauss(rng);
        }
        row0 += br;
        col0 += bc;
      }
      break;
    }
    case StructureKind::dense_random:
      for (Index i = 0; i < spec.n; ++i) {
        for (Index j = 0; j < spec.r; ++j) a(i, j) = gauss(rng);
      }
      break;
    case StructureKind::identity: a.setIdentity(); break;
    case StructureKind::explicit_matrix: a = *spec.explicit_entries; break;
  }
  return StructureMatrix(std::move(a));
}

StructureMatrix gen_structure(const StructureSpec& spec) {
  Rng rng(spec.seed);
  return gen_structure(spec, rng);
}

Matrix gen_latents(const LatentSpec& spec, Index N, Rng& rng) {
  spec.validate();
  if (N < 1) throw Error(Errc::invalid_argument, "N must be >= 1");
  const Vector mean = spec.mean_or_default();
  const Vector scale = spec.scale_or_default();
  Matrix z(N, spec.r);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < spec.r; ++j) {
      double draw = 0.0;
      switch (spec.kind) {
        case LatentKind::gaussian: draw = gauss(rng); break;
        case LatentKind::uniform: draw = unit(rng); break;
        case LatentKind::exponential: draw = expo(rng) - 1.0; break;
      }
      z(i, j) = mean(j) + scale(j) * draw;
    }
  }
  return z;
}

Dataset gen_dataset(const StructureMatrix& a, const Matrix& z) {
  if (z.cols() != a.r()) {
    throw Error(Errc::dimension_mismatch, "latent width " + std::to_string(z.cols()) + " differs from r = " +
                                              std::to_string(a.r()));
  }
  return Dataset(z * a.entries().transpose());
}

Vector true_mean(const StructureMatrix& a, const LatentSpec& spec) {
  if (spec.r != a.r()) throw Error(Errc::dimension_mismatch, "latent dimension differs from A's columns");
  return a.entries() * spec.mean_or_default();
}

Matrix population_covariance(const StructureMatrix& a, const LatentSpec& spec) {
  if (spec.r != a.r()) throw Error(Errc::dimension_mismatch, "latent dimension differs from A's columns");
  return a.entries() * spec.covariance() * a.entries().transpose();
}

}  // namespace robustmean
