#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "siclab/errors.hpp"
#include "siclab/experiments.hpp"
#include "siclab/security.hpp"

namespace siclab {
namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream out;
  write_summary_csv(out, r);
  return out.str();
}

std::string trials_csv(const ExperimentResult& r) {
  std::ostringstream out;
  write_trials_csv(out, r);
  return out.str();
}

ExperimentSpec small_grid() {
  ExperimentSpec spec = ExperimentSpec::defaults(ExperimentKind::variance_grid);
  spec.plants.ladder_size = 3;
  spec.grid = {40, 80};
  spec.trials = 4;
  spec.variances = {{1, 0.1}, {0.1, 0.01}, {1, 10}};
  spec.master_seed = 9;
  return spec;
}

TEST(ExperimentKind, RoundTripsNames) {
  for (auto k : {ExperimentKind::error_sweep, ExperimentKind::variance_grid,
                 ExperimentKind::gramian_sweep}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_experiment_kind("monte-carlo"), InputError);
}

TEST(ExperimentSpec, Defaults) {
  const auto sweep = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  ASSERT_EQ(sweep.grid.size(), 10u);
  EXPECT_EQ(sweep.grid.front(), 200);
  EXPECT_EQ(sweep.grid.back(), 2000);
  EXPECT_EQ(sweep.trials, 50u);
  EXPECT_EQ(sweep.plants.kind, PlantSource::Kind::builtin);

  const auto grid = ExperimentSpec::defaults(ExperimentKind::variance_grid);
  EXPECT_EQ(grid.variances.size(), 9u);
  EXPECT_EQ(grid.grid, (std::vector<Index>{250, 500, 1000, 2000}));
  EXPECT_EQ(grid.plants.ladder_size, 20);

  const auto gram = ExperimentSpec::defaults(ExperimentKind::gramian_sweep);
  EXPECT_EQ(gram.grid, (std::vector<Index>{1000, 3000, 5000}));
  ASSERT_EQ(gram.variances.size(), 1u);
  EXPECT_EQ(gram.variances[0].sigma_w_sq, 0.1);
  EXPECT_EQ(gram.variances[0].sigma_u_sq, 10.0);
}

TEST(ExperimentSpec, Validation) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.variances = {{0.0, 1.0}};
  EXPECT_THROW(spec.validate(), InputError);
  spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.grid = {400, 200};
  EXPECT_THROW(spec.validate(), InputError);
  spec.grid = {1, 2};
  EXPECT_THROW(spec.validate(), InputError);
  spec.grid = {};
  EXPECT_THROW(spec.validate(), InputError);
  spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.trials = 0;
  EXPECT_THROW(spec.validate(), InputError);
  spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.variances = {{1, 1}, {1, 2}};
  EXPECT_THROW(spec.validate(), InputError);
  EXPECT_NO_THROW(ExperimentSpec::defaults(ExperimentKind::variance_grid).validate());
}

TEST(ExperimentSeed, DistinctAcrossCoordinates) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 20; ++p)
    for (std::uint64_t c = 0; c < 36; ++c)
      for (std::uint64_t t = 0; t < 50; ++t) seen.insert(experiment_seed(0, p, c, t));
  EXPECT_EQ(seen.size(), 20u * 36u * 50u);
  EXPECT_NE(experiment_seed(0, 0, 0, 0), experiment_seed(1, 0, 0, 0));
}

TEST(ErrorSweep, SchemaBoundAndDeterminism) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.grid = {50, 100, 200};
  spec.trials = 8;
  const ExperimentResult a = run_experiment(spec);
  ASSERT_EQ(a.summary.size(), 3u);
  ASSERT_EQ(a.trials.size(), 24u);
  for (const SummaryRow& row : a.summary) {
    EXPECT_GE(row.mean_epsilon, row.gamma_exact - 3 * row.standard_error);
    EXPECT_GT(row.standard_error, 0.0);
  }
  EXPECT_EQ(first_line(summary_csv(a)), "N,mean_epsilon,stderr,gamma_exact,gamma_approx");
  EXPECT_EQ(first_line(trials_csv(a)), "N,trial,epsilon");

  const ExperimentResult b = run_experiment(spec);
  EXPECT_EQ(summary_csv(a), summary_csv(b));
  EXPECT_EQ(trials_csv(a), trials_csv(b));
  EXPECT_EQ(a.metadata, b.metadata);

  spec.master_seed = 1;
  EXPECT_NE(trials_csv(run_experiment(spec)), trials_csv(a));
}

TEST(ErrorSweep, MetadataRecordsSpec) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.grid = {20};
  spec.trials = 2;
  spec.master_seed = 42;
  const ExperimentResult r = run_experiment(spec);
  EXPECT_EQ(r.metadata["kind"], "error-sweep");
  EXPECT_EQ(r.metadata["master_seed"], 42u);
  EXPECT_EQ(r.metadata["spec"], spec.to_json());
  EXPECT_EQ(r.metadata["spec_hash"].get<std::string>().size(), 16u);
}

TEST(ErrorSweep, SingleTrialHasZeroStandardError) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::error_sweep);
  spec.grid = {30};
  spec.trials = 1;
  const ExperimentResult r = run_experiment(spec);
  EXPECT_EQ(r.summary.front().standard_error, 0.0);
}

TEST(VarianceGrid, RowsAndAggregates) {
  const ExperimentSpec spec = small_grid();
  const ExperimentResult r = run_experiment(spec);
  // 3 plants x 3 pairs x 2 N, then 3 x 2 aggregates.
  ASSERT_EQ(r.summary.size(), 18u + 6u);
  EXPECT_EQ(r.trials.size(), 18u * 4u);
  for (std::size_t i = 18; i < r.summary.size(); ++i) EXPECT_FALSE(r.summary[i].plant_id);
  EXPECT_EQ(first_line(summary_csv(r)),
            "plant_id,sigma_w_sq,sigma_u_sq,N,mean_epsilon,stderr,gamma_exact,gamma_approx");
  EXPECT_EQ(first_line(trials_csv(r)), "plant_id,sigma_w_sq,sigma_u_sq,N,trial,epsilon");
  EXPECT_NE(summary_csv(r).find("\nall,"), std::string::npos);
  EXPECT_EQ(summary_csv(r), summary_csv(run_experiment(spec)));
}

TEST(VarianceGrid, GammaDependsOnlyOnRatio) {
  const ExperimentResult r = run_experiment(small_grid());
  // Pairs 0 and 1 share R = 0.1.
  for (int p = 0; p < 3; ++p) {
    for (int i = 0; i < 2; ++i) {
      const SummaryRow& a = r.summary[p * 6 + 0 * 2 + i];
      const SummaryRow& b = r.summary[p * 6 + 1 * 2 + i];
      ASSERT_EQ(a.samples, b.samples);
      EXPECT_NEAR(a.gamma_exact, b.gamma_exact, 1e-14 * a.gamma_exact);
      const SummaryRow& c = r.summary[p * 6 + 2 * 2 + i];
      EXPECT_LT(c.gamma_exact, a.gamma_exact);
    }
  }
}

TEST(GramianSweep, OrderedByTraceWithDecreasingGamma) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::gramian_sweep);
  const ExperimentResult r = run_experiment(spec);
  ASSERT_EQ(r.gramian.size(), 20u * 3u);
  for (std::size_t i = 3; i < r.gramian.size(); i += 3) {
    EXPECT_LT(r.gramian[i - 3].tr_psi1, r.gramian[i].tr_psi1);
    EXPECT_GT(r.gramian[i - 3].gamma, r.gramian[i].gamma);
  }
  for (std::size_t i = 0; i < r.gramian.size(); i += 3) {
    EXPECT_GT(r.gramian[i].gamma, r.gramian[i + 1].gamma);
    EXPECT_GT(r.gramian[i + 1].gamma, r.gramian[i + 2].gamma);
  }
  std::ostringstream out;
  write_gramian_csv(out, r);
  EXPECT_EQ(first_line(out.str()), "plant_id,tr_psi1,j,gamma");
  EXPECT_TRUE(r.trials.empty());
}

TEST(GramianSweep, GammaMatchesApproximation) {
  auto spec = ExperimentSpec::defaults(ExperimentKind::gramian_sweep);
  spec.plants.ladder_size = 2;
  const ExperimentResult r = run_experiment(spec);
  const auto plants = plant_ladder(2, 4, 2);
  for (const GramianRow& row : r.gramian) {
    const double expected = gamma_approx(plants[row.plant_id], NoiseConfig(0.1, 10), row.j + 1);
    EXPECT_NEAR(row.gamma, expected, 1e-15 * expected);
  }
}

}  // namespace
}  // namespace siclab
