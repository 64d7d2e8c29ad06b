#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "siclab/errors.hpp"
#include "siclab/model.hpp"
#include "siclab/security.hpp"
#include "siclab/sysid.hpp"

namespace siclab {
namespace {

TEST(SimulateAttack, NoExcitationMeansAllZero) {
  const TrajectoryData d = simulate_attack(reference_plant(), NoiseConfig(0.0, 0.0), 50, 3);
  EXPECT_TRUE(d.states.isZero(0.0));
  EXPECT_TRUE(d.inputs.isZero(0.0));
}

TEST(SimulateAttack, DeterministicInSeed) {
  const LinearSystem sys = reference_plant();
  const NoiseConfig noise(1.0, 1.0);
  const TrajectoryData a = simulate_attack(sys, noise, 300, 99);
  const TrajectoryData b = simulate_attack(sys, noise, 300, 99);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_NE(simulate_attack(sys, noise, 300, 100).states, a.states);
}

TEST(SimulateAttack, SatisfiesDataEquation) {
  const LinearSystem sys = reference_plant();
  AttackOptions opts;
  opts.keep_noise = true;
  const TrajectoryData d = simulate_attack(sys, NoiseConfig(0.5, 2.0), 400, 1, opts);
  ASSERT_TRUE(d.noises.has_value());
  const Index j = d.samples() - 1;
  const Matrix rebuilt = sys.a() * d.states.leftCols(j) + sys.b() * d.inputs.leftCols(j) + *d.noises;
  EXPECT_LE((rebuilt - d.states.rightCols(j)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(simulate_attack(sys, NoiseConfig(0.5, 2.0), 400, 1).noises.has_value());
}

TEST(SimulateAttack, NoiseAndInputStreamsAreIndependent) {
  const LinearSystem sys = reference_plant();
  AttackOptions opts;
  opts.keep_noise = true;
  const TrajectoryData quiet = simulate_attack(sys, NoiseConfig(1.0, 0.0), 100, 8, opts);
  const TrajectoryData loud = simulate_attack(sys, NoiseConfig(1.0, 4.0), 100, 8, opts);
  EXPECT_EQ(*quiet.noises, *loud.noises);
  EXPECT_EQ(quiet.states.col(0), loud.states.col(0));
}

TEST(SimulateAttack, InitialStateIsFirstNoiseDraw) {
  // Across seeds x_0 ~ N(0, sigma_w^2 I).
  const NoiseConfig noise(2.5, 1.0);
  double sum2 = 0.0;
  constexpr int kSeeds = 4000;
  for (int s = 0; s < kSeeds; ++s) {
    sum2 += simulate_attack(reference_plant(), noise, 2, s).states.col(0).squaredNorm();
  }
  const double var = sum2 / (4.0 * kSeeds);
  EXPECT_NEAR(var, 2.5, 5.0 * 2.5 * std::sqrt(2.0 / (4.0 * kSeeds)));
}

TEST(SimulateAttack, InputVarianceWithinChiSquareBand) {
  const TrajectoryData d = simulate_attack(reference_plant(), NoiseConfig(1.0, 1.0), 10000, 2024);
  for (Index i = 0; i < d.m(); ++i) {
    const double mean = d.inputs.row(i).mean();
    const double var = (d.inputs.row(i).array() - mean).square().sum() / (d.samples() - 1);
    EXPECT_GE(var, 0.94);
    EXPECT_LE(var, 1.06);
  }
}

TEST(SimulateAttack, ReportsDivergenceIndex) {
  const LinearSystem unstable(1e30 * Matrix::Identity(2, 2), Matrix::Ones(2, 1));
  try {
    simulate_attack(unstable, NoiseConfig(1.0, 1.0), 100, 0);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time_index(), 0);
    EXPECT_LT(e.time_index(), 100);
  }
}

TEST(SimulateAttack, RejectsTooFewSamples) {
  EXPECT_THROW(simulate_attack(reference_plant(), NoiseConfig(1, 1), 1, 0), InputError);
}

TEST(LeastSquares, NoiselessDataRecoversPlantExactly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LinearSystem sys = random_stable_plant(4, 2, 0.8, seed);
    AttackOptions opts;
    opts.initial_state = Vector::Ones(4);
    const Index j = 5 * (4 + 2);
    const TrajectoryData d = simulate_attack(sys, NoiseConfig(0.0, 1.0), j + 1, seed, opts);
    const IdentificationResult r = least_squares_identify(d, sys);
    Matrix est(4, 6);
    est << r.a_hat, r.b_hat;
    EXPECT_LE((sys.parameters() - est).norm(), 1e-8);
    EXPECT_LE(*r.epsilon, 1e-16);
    EXPECT_TRUE(r.rank_ok);
    EXPECT_EQ(r.entry_count, 24);
  }
}

TEST(LeastSquares, InsufficientSamplesNamesMinimum) {
  const LinearSystem sys = reference_plant();
  const TrajectoryData d = simulate_attack(sys, NoiseConfig(1, 1), 6, 0);  // j = 5 = n+m-1
  try {
    least_squares_identify(d);
    FAIL();
  } catch (const InsufficientSamplesError& e) {
    EXPECT_EQ(e.required(), 7);
    EXPECT_NE(std::string(e.what()).find("insufficient samples"), std::string::npos);
  }
  EXPECT_NO_THROW(least_squares_identify(simulate_attack(sys, NoiseConfig(1, 1), 7, 0)));
}

TEST(LeastSquares, RankDeficientDataRefused) {
  // No probing input: U_p = 0, so D loses m rows of rank.
  const TrajectoryData d = simulate_attack(reference_plant(), NoiseConfig(1.0, 0.0), 200, 0);
  EXPECT_THROW(least_squares_identify(d), RankDeficientError);
}

TEST(LeastSquares, ResidualIsOrthogonalToRegressors) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LinearSystem sys = random_stable_plant(1 + seed % 4, 1 + seed % 2, 0.9, seed);
    const TrajectoryData d = simulate_attack(sys, NoiseConfig(1.0, 1.0), 60 + 10 * seed, seed);
    const IdentificationResult r = least_squares_identify(d);
    const Index j = d.samples() - 1;
    Matrix reg(d.n() + d.m(), j);
    reg << d.states.leftCols(j), d.inputs.leftCols(j);
    Matrix theta(d.n(), d.n() + d.m());
    theta << r.a_hat, r.b_hat;
    const Matrix xf = d.states.rightCols(j);
    EXPECT_LE(((xf - theta * reg) * reg.transpose()).norm(), 1e-8 * xf.norm());
  }
}

TEST(EstimationError, MeanSquareOverEntries) {
  const LinearSystem sys(Matrix::Zero(2, 2), Matrix::Zero(2, 1));
  Matrix a_hat = Matrix::Zero(2, 2);
  a_hat(0, 0) = 3.0;
  Matrix b_hat = Matrix::Zero(2, 1);
  b_hat(1, 0) = 4.0;
  EXPECT_DOUBLE_EQ(estimation_error(sys, a_hat, b_hat), 25.0 / 6.0);
}

TEST(MeanError, SingleTrial) {
  const ErrorStatistics s = mean_error(reference_plant(), NoiseConfig(1, 1), 100, 1, 5);
  ASSERT_EQ(s.per_trial.size(), 1u);
  EXPECT_EQ(s.mean, s.per_trial[0]);
  EXPECT_EQ(s.standard_error, 0.0);
}

TEST(MeanError, DeterministicAndOrderedByTrial) {
  const LinearSystem sys = reference_plant();
  const ErrorStatistics a = mean_error(sys, NoiseConfig(1, 1), 200, 20, 11);
  const ErrorStatistics b = mean_error(sys, NoiseConfig(1, 1), 200, 20, 11);
  EXPECT_EQ(a.per_trial, b.per_trial);
  EXPECT_EQ(a.mean, b.mean);
  const TrajectoryData d = simulate_attack(sys, NoiseConfig(1, 1), 200, trial_seed(11, 7));
  EXPECT_EQ(a.per_trial[7], *least_squares_identify(d, sys).epsilon);
}

TEST(MeanError, InvariantUnderTrialRelabeling) {
  const LinearSystem sys = reference_plant();
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 30; ++k) seeds.push_back(trial_seed(3, k));
  const ErrorStatistics fwd = mean_error(sys, NoiseConfig(1, 1), 150, seeds);
  std::reverse(seeds.begin(), seeds.end());
  const ErrorStatistics rev = mean_error(sys, NoiseConfig(1, 1), 150, seeds);
  EXPECT_NEAR(fwd.mean, rev.mean, 1e-15 * fwd.mean);
  std::vector<double> flipped(rev.per_trial.rbegin(), rev.per_trial.rend());
  EXPECT_EQ(flipped, fwd.per_trial);
}

TEST(MeanError, DecreasesWithSamples) {
  const LinearSystem sys = reference_plant();
  const double small = mean_error(sys, NoiseConfig(1, 1), 200, 50, 0).mean;
  const double large = mean_error(sys, NoiseConfig(1, 1), 2000, 50, 0).mean;
  EXPECT_LT(large, small);
}

TEST(MeanError, RankDeficientTrialAbortsWithIndex) {
  try {
    mean_error(reference_plant(), NoiseConfig(1.0, 0.0), 100, 3, 0);
    FAIL();
  } catch (const TrialError& e) {
    EXPECT_EQ(e.trial(), 0u);
  }
}

TEST(MeanError, ReferencePlantNearBound) {
  const LinearSystem sys = reference_plant();
  const NoiseConfig noise(1, 1);
  const ErrorStatistics s = mean_error(sys, noise, 1000, 50, 42);
  const double gamma = gamma_exact(sys, noise, 1000);
  EXPECT_GE(s.mean, gamma - 3.0 * s.standard_error);
  EXPECT_GE(s.mean, 0.5 * gamma);
  EXPECT_LE(s.mean, 1.5 * gamma);
}

TEST(MeanError, LowerBoundHoldsAcrossPlantsAndSizes) {
  std::vector<LinearSystem> plants = {reference_plant()};
  for (int k : {0, 9, 19}) plants.push_back(random_stable_plant(4, 2, ladder_radius(k, 20), k));
  for (std::size_t p = 0; p < plants.size(); ++p) {
    for (const NoiseConfig noise : {NoiseConfig(1, 1), NoiseConfig(0.1, 10), NoiseConfig(10, 0.1)}) {
      for (Index n : {200, 500, 1000, 2000}) {
        const ErrorStatistics s = mean_error(plants[p], noise, n, 50, 7 + p);
        EXPECT_GE(s.mean, gamma_exact(plants[p], noise, n) - 3.0 * s.standard_error)
            << "plant " << p << " N " << n;
      }
    }
  }
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const TrajectoryData d = simulate_attack(reference_plant(), NoiseConfig(1, 1), 3, 0);
  std::ostringstream out;
  write_trajectory_csv(out, d);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,u_1,u_2,x_1,x_2,x_3,x_4");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

}  // namespace
}  // namespace siclab
