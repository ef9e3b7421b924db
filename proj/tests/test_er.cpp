#include <doctest.h>

#include <algorithm>

#include <ernmf/er.hpp>
#include <ernmf/evalbench.hpp>
#include <ernmf/rng.hpp>
#include <ernmf/svd.hpp>

#include "support.hpp"

using namespace ernmf;

TEST_CASE("mu is the largest column norm") {
  Eigen::MatrixXd K(2, 2);
  K << 0.5, 0.3, 0.5, 0.3;
  CHECK(mu(K) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(mu(Eigen::MatrixXd(3, 0)) == 0.0);
}

TEST_CASE("epsilon bound closed form") {
  // Identity basis, one mixed column: sigma_r = 1, mu = sqrt(1/2).
  const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd K(2, 1);
  K << 0.5, 0.5;
  const InstanceDiagnostics diag = epsilon_bound(F, K);
  CHECK(diag.sigma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(diag.mu == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(diag.epsilon ==
        doctest::Approx((1.0 - std::sqrt(0.5)) / 4.0).epsilon(1e-12));
  CHECK(std::isnan(diag.noise_norm));
}

TEST_CASE("epsilon bound never goes negative") {
  // A combination column longer than 1 would make the formula negative;
  // the bound clamps at zero since no noise level is then certified.
  const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd K(2, 1);
  K << 1.2, 0.3;
  CHECK(epsilon_bound(F, K).epsilon == 0.0);
}

TEST_CASE("epsilon bound demands full column rank") {
  Eigen::MatrixXd F(3, 2);
  F << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(epsilon_bound(F, Eigen::MatrixXd(2, 0)), RankError);
}

TEST_CASE("er_exact recovers noiseless separable columns") {
  rng::Stream s(401);
  // Tight active window, and mixtures kept strictly interior: a random
  // Dirichlet mixture can coincide with a vertex (small concentration
  // underflows to a one-hot column), which is genuinely ambiguous data.
  CuttingPlaneConfig tight;
  tight.tol = 1e-9;
  tight.active_tol = 1e-10;
  int done = 0;
  for (int attempt = 0; attempt < 200 && done < 10; ++attempt) {
    const Index r = 2 + static_cast<Index>(s.below(5));
    auto inst = gen_synthetic(20, 120, r, 0.0, s.next());
    double worst = 0.0;
    for (Index j = 0; j < inst.K.cols(); ++j)
      worst = std::max(worst, inst.K.col(j).maxCoeff());
    if (worst > 0.999) continue;
    ++done;
    const ErResult res = er_exact(inst.M, r, tight);
    CHECK(res.indices == inst.true_indices);
    CHECK(res.candidate_set == inst.true_indices);
    CHECK(res.rho_used == r);
    CHECK(!res.selector_used.has_value());
    CHECK(std::is_sorted(res.indices.begin(), res.indices.end()));
  }
  CHECK(done == 10);
}

TEST_CASE("er_exact survives noise below the certified level") {
  rng::Stream s(409);
  for (int rep = 0; rep < 5; ++rep) {
    auto inst = gen_synthetic(25, 200, 5, 0.1, s.next());
    const InstanceDiagnostics diag = diagnostics(inst);
    REQUIRE(diag.epsilon > 0.0);
    auto scaled = rescale_noise(inst, 0.5 * diag.epsilon);
    CuttingPlaneConfig tight;
    tight.tol = 1e-9;
    tight.active_tol = 1e-10;
    const ErResult res = er_exact(scaled.M, 5, tight);
    CHECK(res.indices == scaled.true_indices);
    // Identified columns sit within the noise radius of their basis vectors.
    Eigen::MatrixXd diff(25, 5);
    for (Index k = 0; k < 5; ++k)
      diff.col(k) = scaled.M.col(scaled.perm[static_cast<std::size_t>(k)]) -
                    scaled.F.col(k);
    CHECK(spectral_norm(diff) < diag.epsilon);
  }
}

TEST_CASE("er_exact reports surplus active points instead of guessing") {
  // This instance's vertex 22 is duplicated at column 30: both copies are
  // boundary points, so the exact variant must refuse to pick.
  auto inst = gen_synthetic(12, 40, 4, 0.0, 77);
  Eigen::MatrixXd Md = inst.M.to_dense();
  Md.col(30) = Md.col(inst.true_indices[0]);
  try {
    er_exact(DataMatrix::dense(Md), 4);
    FAIL("expected AmbiguousActiveSetError");
  } catch (const AmbiguousActiveSetError& e) {
    IndexList expected = inst.true_indices;
    expected.push_back(30);
    std::sort(expected.begin(), expected.end());
    CHECK(e.candidate_set == expected);
  }
}

TEST_CASE("er_practical resolves a duplicated vertex by selection") {
  auto inst = gen_synthetic(12, 40, 4, 0.0, 77);
  Eigen::MatrixXd Md = inst.M.to_dense();
  Md.col(30) = Md.col(inst.true_indices[0]);
  const ErResult res = er_practical(DataMatrix::dense(Md), 4, 4, {});
  CHECK(res.indices == inst.true_indices);  // lowest-index copy wins
  CHECK(res.candidate_set.size() == 5);
  REQUIRE(res.selector_used.has_value());
  CHECK(*res.selector_used == SelectorAlgorithm::spa);
}

TEST_CASE("er_practical handles an ambiguous noisy instance") {
  // Chosen so that the tight exact solve sees six boundary points.
  auto inst =
      gen_synthetic(30, 300, 5, 0.1, rng::derive(1, 0xc2, 96, 0));
  auto scaled = rescale_noise(inst, 0.5 * epsilon_bound(inst.F, inst.K).epsilon);
  CuttingPlaneConfig tight;
  tight.tol = 1e-9;
  tight.active_tol = 1e-10;
  CHECK_THROWS_AS(er_exact(scaled.M, 5, tight), AmbiguousActiveSetError);
  const ErResult res = er_practical(scaled.M, 5, 5, {}, tight);
  CHECK(res.rho_used == 5);
  CHECK(res.candidate_set.size() == 6);
  CHECK(res.indices == scaled.true_indices);
}

TEST_CASE("one basis vector means every column is that vector") {
  auto inst = gen_synthetic(8, 20, 1, 0.0, 9);
  CHECK_THROWS_AS(er_exact(inst.M, 1), AmbiguousActiveSetError);
  const ErResult res = er_practical(inst.M, 1, 1, {});
  REQUIRE(res.indices.size() == 1);
  CHECK((inst.M.col(res.indices[0]) - inst.F.col(0)).norm() <= 1e-12);
}

TEST_CASE("er refuses rank-deficient data") {
  rng::Stream s(419);
  const Eigen::MatrixXd U = test_support::random_nonneg(s, 10, 2);
  const Eigen::MatrixXd V = test_support::random_nonneg(s, 2, 30);
  const DataMatrix M = DataMatrix::dense(U * V);  // rank 2
  CHECK_THROWS_AS(er_exact(M, 4), RankError);
  try {
    er_practical(M, 4, 4, {});
    FAIL("expected RankError");
  } catch (const RankError& e) {
    CHECK(e.numerical_rank == 2);
  }
}

TEST_CASE("er validates arguments") {
  auto inst = gen_synthetic(10, 30, 3, 0.0, 3);
  CHECK_THROWS_AS(er_exact(inst.M, 0), InputError);
  CHECK_THROWS_AS(er_practical(inst.M, 3, 0, {}), InputError);
  CHECK_THROWS_AS(er_practical(inst.M, 31, 31, {}), InputError);
}

TEST_CASE("er_practical may start below r and escalate") {
  auto inst = gen_synthetic(10, 30, 3, 0.0, 3);
  const ErResult res = er_practical(inst.M, 3, 1, {});
  CHECK(res.indices.size() == 3);
  CHECK(std::is_sorted(res.indices.begin(), res.indices.end()));
  CHECK(res.rho_used >= 1);
  CHECK(res.candidate_set.size() >= 3);
}

TEST_CASE("candidate set always contains the returned indices") {
  rng::Stream s(421);
  for (int rep = 0; rep < 5; ++rep) {
    auto inst = gen_synthetic(15, 80, 4, 0.02, s.next());
    ErResult res;
    try {
      res = er_practical(inst.M, 4, 4, {});
    } catch (const InputError&) {
      continue;  // occasional deep-noise rank trouble is legitimate
    }
    CHECK(std::includes(res.candidate_set.begin(), res.candidate_set.end(),
                        res.indices.begin(), res.indices.end()));
    CHECK(std::is_sorted(res.indices.begin(), res.indices.end()));
    CHECK(res.indices.size() == 4);
  }
}

TEST_CASE("diagnostics reports the actual noise norm") {
  auto inst = gen_synthetic(12, 50, 3, 0.07, 31);
  const InstanceDiagnostics diag = diagnostics(inst);
  CHECK(diag.noise_norm ==
        doctest::Approx(spectral_norm(inst.N)).epsilon(1e-10));
  const auto scaled = rescale_noise(inst, 0.25);
  CHECK(diagnostics(scaled).noise_norm == doctest::Approx(0.25).epsilon(1e-9));
}
