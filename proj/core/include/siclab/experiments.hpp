#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "siclab/model.hpp"

namespace siclab {

enum class ExperimentKind { error_sweep, variance_grid, gramian_sweep };

ExperimentKind parse_experiment_kind(std::string_view text);
std::string_view to_string(ExperimentKind kind) noexcept;

struct PlantSource {
  enum class Kind { builtin, file, ladder };
  Kind kind = Kind::builtin;
  std::string path;  // Kind::file
  int ladder_size = 20;
  Index ladder_n = 4;
  Index ladder_m = 2;
};

struct VariancePair {
  double sigma_w_sq;
  double sigma_u_sq;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::error_sweep;
  PlantSource plants;
  // Sample counts N for the Monte Carlo kinds, regression lengths j for
  // the Gramian sweep.
  std::vector<Index> grid;
  std::size_t trials = 50;
  std::vector<VariancePair> variances;
  std::uint64_t master_seed = 0;

  // Desk-scale defaults for each kind.
  static ExperimentSpec defaults(ExperimentKind kind);

  // Throws InputError: empty or non-ascending grid, trials == 0, zero
  // process noise, or (error sweep) more than one plant / variance pair.
  void validate() const;

  nlohmann::json to_json() const;
};

struct TrialRow {
  int plant_id;
  VariancePair variance;
  Index samples;
  std::size_t trial;
  double epsilon;
};

struct SummaryRow {
  std::optional<int> plant_id;  // nullopt: average over all plants
  VariancePair variance;
  Index samples;
  double mean_epsilon;
  double standard_error;
  double gamma_exact;
  double gamma_approx;
};

struct GramianRow {
  int plant_id;
  double tr_psi1;
  Index j;
  double gamma;  // large-j approximation; depends on the plant only via tr(Psi_1)
};

struct ExperimentResult {
  ExperimentKind kind;
  std::vector<TrialRow> trials;
  std::vector<SummaryRow> summary;
  std::vector<GramianRow> gramian;
  nlohmann::json metadata;
};

std::vector<LinearSystem> resolve_plants(const PlantSource& source);

// hash64(master_seed, plant index, cell index, trial index)
std::uint64_t experiment_seed(std::uint64_t master_seed, std::uint64_t plant,
                              std::uint64_t cell, std::uint64_t trial) noexcept;

/// Monte Carlo identification error against gamma for every N in the grid.
/// Each summary row is checked against mean >= gamma_exact - 3 SE before it
/// is returned; a violation throws BoundViolationError.
ExperimentResult run_error_sweep(const ExperimentSpec& spec);

/// One row per (plant, variance pair, N) plus rows averaged over plants.
ExperimentResult run_variance_grid(const ExperimentSpec& spec);

/// gamma_approx at each j for every plant, sorted by tr(Psi_1) ascending.
/// Uses variances.front() (default sigma_w^2 = 0.1, sigma_u^2 = 10).
ExperimentResult run_gramian_sweep(const ExperimentSpec& spec);

ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_trials_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);
void write_gramian_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace siclab
