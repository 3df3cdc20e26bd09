#include <gtest/gtest.h>

#include "robustmean/error.hpp"
#include "robustmean/structure.hpp"
#include "test_util.hpp"

using namespace robustmean;

namespace {

Matrix rows_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(Rank, SmallCases) {
  EXPECT_EQ(rank(StructureMatrix(Matrix::Identity(3, 3))), 3);
  EXPECT_EQ(rank(StructureMatrix(Matrix::Ones(3, 1))), 1);
  Matrix dep(4, 2);
  dep << 1, 2, 3, 6, -1, -2, 0.5, 1;
  EXPECT_EQ(rank(StructureMatrix(dep)), 1);
}

TEST(Rank, InvariantUnderScaling) {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    Matrix a = Matrix::Random(6, 3);
    a.col(2) = a.col(0) - 0.5 * a.col(1);
    const StructureMatrix s(a);
    EXPECT_EQ(StructureMatrix(10.0 * a).rank(), s.rank());
    EXPECT_EQ(StructureMatrix(1e-6 * a).rank(), s.rank());
  }
}

TEST(MA, IdentityIsOne) {
  for (Index n = 1; n <= 6; ++n) EXPECT_EQ(compute_mA_exact(StructureMatrix(Matrix::Identity(n, n))), 1);
}

TEST(MA, RepeatedE1IsN) {
  for (Index n = 1; n <= 7; ++n) {
    Matrix a = Matrix::Zero(n, 2);
    a.col(0).setOnes();
    EXPECT_EQ(compute_mA_exact(StructureMatrix(a)), n);
  }
}

TEST(MA, GeneralPositionGivesNMinusRPlusOne) {
  Rng rng(5);
  for (Index n = 2; n <= 8; ++n) {
    for (Index r = 1; r <= std::min<Index>(n, 4); ++r) {
      const StructureMatrix a = testutil::general_position(n, r, rng);
      EXPECT_EQ(compute_mA_exact(a), n - r + 1) << n << "x" << r;
    }
  }
}

TEST(MA, RandomFourByTwoIsThree) {
  Rng rng(8);
  const StructureMatrix a(testutil::general_position(4, 2, rng));
  EXPECT_EQ(compute_mA_exact(a), 3);
}

TEST(MA, DefinitionByEnumeration) {
  Rng rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 3 + trial % 5;
    Matrix a(n, 3);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < 3; ++j) a(i, j) = g(rng);
    }
    if (trial % 3 == 0) a.row(1) = 2.0 * a.row(0);
    if (trial % 4 == 0) a.col(2).setZero();
    const StructureMatrix s(a);
    const Index m = compute_mA_exact(s);
    ASSERT_GE(m, 1);
    ASSERT_LE(m, n);
    for_each_subset(n, m - 1, [&](const IndexList& rows) {
      EXPECT_EQ(rank_without_rows(s, rows), s.rank());
      return true;
    });
    bool found = false;
    for_each_subset(n, m, [&](const IndexList& rows) {
      found = found || rank_without_rows(s, rows) < s.rank();
      return !found;
    });
    EXPECT_TRUE(found);
  }
}

TEST(MA, SizeCap) {
  EXPECT_THROW(compute_mA_exact(StructureMatrix(Matrix::Ones(21, 1))), Error);
  try {
    (void)compute_mA_exact(StructureMatrix(Matrix::Ones(21, 1)));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::size_cap);
  }
}

TEST(GeneralPosition, Examples) {
  Rng rng(2);
  EXPECT_TRUE(check_general_position(testutil::general_position(6, 3, rng)));
  Matrix padded(4, 3);
  padded << Matrix::Identity(3, 3), Matrix::Identity(3, 3).row(0);
  EXPECT_FALSE(check_general_position(StructureMatrix(padded)));
  EXPECT_FALSE(check_general_position(StructureMatrix(rows_of({{1, 0}, {1, 0}, {0, 1}}))));
}

TEST(GeneralPosition, RandomGaussianMatricesQualify) {
  Rng rng(9);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Matrix a(6, 3);
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 3; ++j) a(i, j) = g(rng);
    }
    EXPECT_TRUE(check_general_position(StructureMatrix(a)));
  }
}

TEST(NullSpace, Examples) {
  EXPECT_TRUE(null_space_basis(Matrix::Identity(2, 2)).empty());
  const SubspaceBasis b = null_space_basis(rows_of({{1, -1}}));
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(std::abs(b.vectors[0](0)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(b.vectors[0](0), b.vectors[0](1), 1e-12);
}

TEST(NullSpace, OfTransposeAnnihilatesColumns) {
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const StructureMatrix a = testutil::general_position(5, 2, rng);
    const SubspaceBasis b = null_space_basis(a.entries().transpose());
    ASSERT_EQ(b.size(), 3u);
    EXPECT_TRUE(b.orthonormal);
    const Matrix f = b.as_columns(5).transpose();
    EXPECT_LE((f * a.entries()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((f * f.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SampleIndependentRows, IdentityAndDuplicates) {
  Rng rng(1);
  const StructureMatrix id(Matrix::Identity(3, 3));
  for (int k = 0; k < 50; ++k) {
    const IndexList rows = sample_independent_rows(id, 2, rng);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NE(rows[0], rows[1]);
  }
  const StructureMatrix dup(rows_of({{1, 0}, {1, 0}, {0, 1}}));
  for (int k = 0; k < 200; ++k) {
    EXPECT_NE(sample_independent_rows(dup, 2, rng), (IndexList{0, 1}));
  }
}

TEST(SampleIndependentRows, RoughlyUniformOverValidSubsets) {
  Rng rng(17);
  const StructureMatrix dup(rows_of({{1, 0}, {1, 0}, {0, 1}}));
  int count02 = 0;
  const int draws = 4000;
  for (int k = 0; k < draws; ++k) count02 += sample_independent_rows(dup, 2, rng) == IndexList{0, 2} ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(count02) / draws, 0.5, 0.05);
}

TEST(SampleIndependentRows, DegenerateRequests) {
  Rng rng(1);
  const StructureMatrix flat(Matrix::Ones(4, 2));
  try {
    (void)sample_independent_rows(flat, 2, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
  const StructureMatrix id(Matrix::Identity(3, 3));
  try {
    (void)sample_independent_rows(id, 2, rng, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate);
  }
}

TEST(StructureMatrix, CsvRoundTrip) {
  Rng rng(3);
  const StructureMatrix a = testutil::general_position(5, 2, rng);
  const auto path = std::filesystem::temp_directory_path() / "robustmean_structure_rt.csv";
  a.save_csv(path);
  EXPECT_EQ(StructureMatrix::load_csv(path).entries(), a.entries());
  std::filesystem::remove(path);
}

TEST(Subsets, LexicographicOrderAndCount) {
  std::vector<IndexList> seen;
  for_each_subset(5, 3, [&](const IndexList& s) {
    seen.push_back(s);
    return true;
  });
  EXPECT_EQ(seen.size(), binomial(5, 3));
  EXPECT_EQ(seen.front(), (IndexList{0, 1, 2}));
  EXPECT_EQ(seen.back(), (IndexList{2, 3, 4}));
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
}
