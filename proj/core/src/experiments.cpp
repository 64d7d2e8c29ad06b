#include "siclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "siclab/errors.hpp"
#include "siclab/format.hpp"
#include "siclab/plant_io.hpp"
#include "siclab/random.hpp"
#include "siclab/security.hpp"
#include "siclab/sysid.hpp"
#include "siclab/version.hpp"

namespace siclab {

namespace {

std::vector<Index> arithmetic_grid(Index first, Index step, Index last) {
  std::vector<Index> grid;
  for (Index v = first; v <= last; v += step) grid.push_back(v);
  return grid;
}

std::string_view source_name(PlantSource::Kind kind) {
  switch (kind) {
    case PlantSource::Kind::builtin: return "builtin";
    case PlantSource::Kind::file: return "file";
    case PlantSource::Kind::ladder: return "ladder";
  }
  return "builtin";
}

nlohmann::json make_metadata(const ExperimentSpec& spec) {
  const nlohmann::json spec_json = spec.to_json();
  return {{"tool", "siclab"},
          {"version", kVersion},
          {"kind", to_string(spec.kind)},
          {"master_seed", spec.master_seed},
          {"spec", spec_json},
          {"spec_hash", hex64(fnv1a64(spec_json.dump()))}};
}

// Seeds for every (plant, cell, trial) of a Monte Carlo experiment, checked
// for pairwise distinctness before anything runs.
class SeedTable {
 public:
  SeedTable(const ExperimentSpec& spec, std::size_t plants, std::size_t cells)
      : cells_(cells), trials_(spec.trials), seeds_(plants * cells * spec.trials) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(seeds_.size());
    for (std::size_t p = 0; p < plants; ++p)
      for (std::size_t c = 0; c < cells; ++c)
        for (std::size_t k = 0; k < trials_; ++k) {
          const std::uint64_t s = experiment_seed(spec.master_seed, p, c, k);
          if (!seen.insert(s).second) {
            throw std::runtime_error("trial seed collision at plant " + std::to_string(p) +
                                     ", cell " + std::to_string(c) + ", trial " +
                                     std::to_string(k));
          }
          seeds_[(p * cells_ + c) * trials_ + k] = s;
        }
  }

  std::span<const std::uint64_t> cell(std::size_t plant, std::size_t cell) const {
    return {seeds_.data() + (plant * cells_ + cell) * trials_, trials_};
  }

 private:
  std::size_t cells_;
  std::size_t trials_;
  std::vector<std::uint64_t> seeds_;
};

void check_bound(const SummaryRow& row, std::size_t trials) {
  // A single trial has no spread estimate; the bound is about the mean.
  if (trials < 2) return;
  if (row.mean_epsilon < row.gamma_exact - 3.0 * row.standard_error) {
    throw BoundViolationError(
        "mean error " + format_double(row.mean_epsilon) + " at N = " +
        std::to_string(row.samples) + " is below gamma - 3 SE = " +
        format_double(row.gamma_exact - 3.0 * row.standard_error));
  }
}

// Runs every trial of one (plant, variance, N) cell.
SummaryRow run_cell(const LinearSystem& plant, int plant_id, const ComplexityModel& model,
                    const VariancePair& variance, Index samples,
                    std::span<const std::uint64_t> seeds, std::vector<TrialRow>& trials) {
  const NoiseConfig noise(variance.sigma_w_sq, variance.sigma_u_sq);
  ErrorStatistics stats;
  try {
    stats = mean_error(plant, noise, samples, seeds);
  } catch (const TrialError& e) {
    throw TrialError("plant " + std::to_string(plant_id) + ", " + e.what(), e.trial(),
                     plant_id);
  }
  for (std::size_t k = 0; k < stats.per_trial.size(); ++k) {
    trials.push_back({plant_id, variance, samples, k, stats.per_trial[k]});
  }
  SummaryRow row{plant_id,         variance,           samples,
                 stats.mean,       stats.standard_error, model.gamma_exact(samples),
                 model.gamma_approx(samples)};
  check_bound(row, seeds.size());
  return row;
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view text) {
  if (text == "error-sweep") return ExperimentKind::error_sweep;
  if (text == "variance-grid") return ExperimentKind::variance_grid;
  if (text == "gramian-sweep") return ExperimentKind::gramian_sweep;
  throw InputError("unknown experiment kind \"" + std::string(text) +
                   "\" (expected error-sweep, variance-grid or gramian-sweep)");
}

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::error_sweep: return "error-sweep";
    case ExperimentKind::variance_grid: return "variance-grid";
    case ExperimentKind::gramian_sweep: return "gramian-sweep";
  }
  return "error-sweep";
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ExperimentKind::error_sweep:
      spec.plants.kind = PlantSource::Kind::builtin;
      spec.grid = arithmetic_grid(200, 200, 2000);
      spec.variances = {{1.0, 1.0}};
      break;
    case ExperimentKind::variance_grid:
      spec.plants.kind = PlantSource::Kind::ladder;
      spec.grid = {250, 500, 1000, 2000};
      for (double w : {0.1, 1.0, 10.0})
        for (double u : {0.1, 1.0, 10.0}) spec.variances.push_back({w, u});
      break;
    case ExperimentKind::gramian_sweep:
      spec.plants.kind = PlantSource::Kind::ladder;
      spec.grid = {1000, 3000, 5000};
      spec.variances = {{0.1, 10.0}};
      break;
  }
  return spec;
}

void ExperimentSpec::validate() const {
  if (grid.empty()) throw InputError("sample grid must be non-empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw InputError("sample grid must be strictly ascending");
  }
  const Index minimum = kind == ExperimentKind::gramian_sweep ? 1 : 2;
  if (grid.front() < minimum) {
    throw InputError(kind == ExperimentKind::gramian_sweep ? "j must be >= 1"
                                                           : "N must be >= 2");
  }
  if (trials == 0) throw InputError("trials must be >= 1");
  if (variances.empty()) throw InputError("at least one variance pair is required");
  for (const VariancePair& v : variances) {
    if (!std::isfinite(v.sigma_w_sq) || !std::isfinite(v.sigma_u_sq) || v.sigma_u_sq < 0.0 ||
        v.sigma_w_sq < 0.0) {
      throw InputError("variances must be finite and non-negative");
    }
    if (v.sigma_w_sq == 0.0) {
      throw InputError("bound undefined for zero process noise (sigma_w^2 = 0)");
    }
  }
  if (kind == ExperimentKind::error_sweep && variances.size() != 1) {
    throw InputError("error-sweep takes exactly one variance pair");
  }
  if (plants.kind == PlantSource::Kind::ladder &&
      (plants.ladder_size < 1 || plants.ladder_n < 1 || plants.ladder_m < 1)) {
    throw InputError("plant ladder needs size, n and m >= 1");
  }
  if (plants.kind == PlantSource::Kind::file && plants.path.empty()) {
    throw InputError("plant file path is empty");
  }
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json source = {{"source", source_name(plants.kind)}};
  if (plants.kind == PlantSource::Kind::file) source["path"] = plants.path;
  if (plants.kind == PlantSource::Kind::ladder) {
    source["size"] = plants.ladder_size;
    source["n"] = plants.ladder_n;
    source["m"] = plants.ladder_m;
  }
  nlohmann::json vars = nlohmann::json::array();
  for (const VariancePair& v : variances) vars.push_back({v.sigma_w_sq, v.sigma_u_sq});
  return {{"kind", to_string(kind)}, {"plants", source},   {"grid", grid},
          {"trials", trials},        {"variances", vars}, {"master_seed", master_seed}};
}

std::vector<LinearSystem> resolve_plants(const PlantSource& source) {
  switch (source.kind) {
    case PlantSource::Kind::builtin: return {reference_plant()};
    case PlantSource::Kind::file: return {load_plant(source.path)};
    case PlantSource::Kind::ladder:
      return plant_ladder(source.ladder_size, source.ladder_n, source.ladder_m);
  }
  return {};
}

std::uint64_t experiment_seed(std::uint64_t master_seed, std::uint64_t plant,
                              std::uint64_t cell, std::uint64_t trial) noexcept {
  return derive_seed({master_seed, plant, cell, trial});
}

ExperimentResult run_error_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<LinearSystem> plants = resolve_plants(spec.plants);
  if (plants.size() != 1) throw InputError("error-sweep runs on exactly one plant");
  const LinearSystem& plant = plants.front();
  const VariancePair variance = spec.variances.front();
  const ComplexityModel model(plant, NoiseConfig(variance.sigma_w_sq, variance.sigma_u_sq));

  const SeedTable seeds(spec, 1, spec.grid.size());
  ExperimentResult result{spec.kind, {}, {}, {}, make_metadata(spec)};
  for (std::size_t c = 0; c < spec.grid.size(); ++c) {
    result.summary.push_back(
        run_cell(plant, 0, model, variance, spec.grid[c], seeds.cell(0, c), result.trials));
  }
  return result;
}

ExperimentResult run_variance_grid(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<LinearSystem> plants = resolve_plants(spec.plants);
  const std::size_t n_grid = spec.grid.size();
  const std::size_t n_cells = spec.variances.size() * n_grid;
  const SeedTable seeds(spec, plants.size(), n_cells);

  ExperimentResult result{spec.kind, {}, {}, {}, make_metadata(spec)};
  // per_cell[cell] collects every plant's row for the cross-plant average.
  std::vector<std::vector<SummaryRow>> per_cell(n_cells);
  for (std::size_t p = 0; p < plants.size(); ++p) {
    for (std::size_t v = 0; v < spec.variances.size(); ++v) {
      const VariancePair& variance = spec.variances[v];
      const ComplexityModel model(plants[p],
                                  NoiseConfig(variance.sigma_w_sq, variance.sigma_u_sq));
      for (std::size_t i = 0; i < n_grid; ++i) {
        const std::size_t cell = v * n_grid + i;
        SummaryRow row = run_cell(plants[p], static_cast<int>(p), model, variance,
                                  spec.grid[i], seeds.cell(p, cell), result.trials);
        per_cell[cell].push_back(row);
        result.summary.push_back(std::move(row));
      }
    }
  }

  const double count = static_cast<double>(plants.size());
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const std::vector<SummaryRow>& rows = per_cell[cell];
    SummaryRow avg{std::nullopt, rows.front().variance, rows.front().samples, 0.0, 0.0, 0.0, 0.0};
    double var_sum = 0.0;
    for (const SummaryRow& r : rows) {
      avg.mean_epsilon += r.mean_epsilon;
      avg.gamma_exact += r.gamma_exact;
      avg.gamma_approx += r.gamma_approx;
      var_sum += r.standard_error * r.standard_error;
    }
    avg.mean_epsilon /= count;
    avg.gamma_exact /= count;
    avg.gamma_approx /= count;
    avg.standard_error = std::sqrt(var_sum) / count;
    check_bound(avg, spec.trials);
    result.summary.push_back(avg);
  }
  return result;
}

ExperimentResult run_gramian_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<LinearSystem> plants = resolve_plants(spec.plants);
  const VariancePair variance = spec.variances.front();
  const NoiseConfig noise(variance.sigma_w_sq, variance.sigma_u_sq);

  std::vector<ComplexityModel> models;
  models.reserve(plants.size());
  for (const LinearSystem& p : plants) models.emplace_back(p, noise);

  std::vector<std::size_t> order(plants.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return models[l].tr_psi1() < models[r].tr_psi1();
  });

  ExperimentResult result{spec.kind, {}, {}, {}, make_metadata(spec)};
  for (std::size_t p : order) {
    for (Index j : spec.grid) {
      result.gramian.push_back(
          {static_cast<int>(p), models[p].tr_psi1(), j, models[p].gamma_approx(j + 1)});
    }
  }

  // Along increasing tr(Psi_1), gamma must strictly decrease at every j.
  const std::size_t n_grid = spec.grid.size();
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      const GramianRow& prev = result.gramian[(i - 1) * n_grid + g];
      const GramianRow& cur = result.gramian[i * n_grid + g];
      if (!(cur.gamma < prev.gamma)) {
        throw std::runtime_error("gamma is not strictly decreasing in tr(Psi_1) between plants " +
                                 std::to_string(prev.plant_id) + " and " +
                                 std::to_string(cur.plant_id));
      }
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::error_sweep: return run_error_sweep(spec);
    case ExperimentKind::variance_grid: return run_variance_grid(spec);
    case ExperimentKind::gramian_sweep: return run_gramian_sweep(spec);
  }
  throw InputError("unknown experiment kind");
}

namespace {

void write_variance_prefix(std::ostream& out, std::optional<int> plant_id,
                           const VariancePair& v) {
  if (plant_id) {
    out << *plant_id;
  } else {
    out << "all";
  }
  out << ',' << format_double(v.sigma_w_sq) << ',' << format_double(v.sigma_u_sq) << ',';
}

}  // namespace

void write_trials_csv(std::ostream& out, const ExperimentResult& result) {
  const bool grid = result.kind == ExperimentKind::variance_grid;
  out << (grid ? "plant_id,sigma_w_sq,sigma_u_sq,N,trial,epsilon\n" : "N,trial,epsilon\n");
  for (const TrialRow& r : result.trials) {
    if (grid) write_variance_prefix(out, r.plant_id, r.variance);
    out << r.samples << ',' << r.trial << ',' << format_double(r.epsilon) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  const bool grid = result.kind == ExperimentKind::variance_grid;
  if (grid) out << "plant_id,sigma_w_sq,sigma_u_sq,";
  out << "N,mean_epsilon,stderr,gamma_exact,gamma_approx\n";
  for (const SummaryRow& r : result.summary) {
    if (grid) write_variance_prefix(out, r.plant_id, r.variance);
    out << r.samples << ',' << format_double(r.mean_epsilon) << ','
        << format_double(r.standard_error) << ',' << format_double(r.gamma_exact) << ','
        << format_double(r.gamma_approx) << '\n';
  }
}

void write_gramian_csv(std::ostream& out, const ExperimentResult& result) {
  out << "plant_id,tr_psi1,j,gamma\n";
  for (const GramianRow& r : result.gramian) {
    out << r.plant_id << ',' << format_double(r.tr_psi1) << ',' << r.j << ','
        << format_double(r.gamma) << '\n';
  }
}

}  // namespace siclab
