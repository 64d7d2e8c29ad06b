#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "siclab/errors.hpp"
#include "siclab/experiments.hpp"
#include "siclab/format.hpp"
#include "siclab/gramian.hpp"
#include "siclab/plant_io.hpp"
#include "siclab/security.hpp"
#include "siclab/sysid.hpp"
#include "siclab/version.hpp"

namespace siclab::cli {

namespace {

using nlohmann::json;

struct Options {
  // global
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;
  std::string plant = "paper";
  bool plant_given = false;
  bool dump_plant = false;
  std::string gain_file;

  double sigma_w2 = 1.0;
  double sigma_u2 = 1.0;

  // gamma
  std::optional<long long> samples;
  std::vector<long long> sample_grid;
  bool approx = false;
  bool explain = false;

  // secure / design
  double gamma_c = 0.0;
  double tau_c = 0.0;
  double flops = 0.0;
  int lambda = 0;
  std::string key_mode = "dynamic";

  // identify
  long long trials = 50;
  bool trials_given = false;
  std::string dump;
  std::vector<double> x0;

  // sweep
  std::string kind;
  std::vector<std::string> variances;
  std::optional<int> ladder;
};

// Writes to --output when given, otherwise to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw InputError("cannot open output file " + path);
      stream_ = &file_;
    } else {
      stream_ = &fallback;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open output file " + path);
  return out;
}

bool want_json(const Options& o) { return o.format == "json"; }

NoiseConfig noise_of(const Options& o) { return NoiseConfig(o.sigma_w2, o.sigma_u2); }

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

Index to_samples(long long v) {
  if (v < 2) throw InputError("N must be >= 2");
  return static_cast<Index>(v);
}

// --- gamma ---------------------------------------------------------------

int run_gamma(const Options& o, const LinearSystem& sys, std::ostream& out) {
  std::vector<Index> grid;
  if (o.samples) grid.push_back(to_samples(*o.samples));
  for (long long v : o.sample_grid) grid.push_back(to_samples(v));
  if (grid.empty()) throw InputError("one of --n or --n-grid is required");

  if (o.sigma_w2 == 0.0) throw InputError("bound undefined for zero process noise (--sigma-w2 0)");
  const ComplexityProfile profile = complexity_profile(sys, noise_of(o), grid);

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (want_json(o)) {
    json rows = json::array();
    for (const ComplexityPoint& p : profile.grid) {
      json row = {{"N", p.samples}, {"gamma_exact", p.gamma_exact}};
      if (o.approx) row["gamma_approx"] = p.gamma_approx;
      rows.push_back(std::move(row));
    }
    json doc = {{"rows", rows}};
    if (o.explain) {
      doc["tr_psi1"] = profile.tr_psi1;
      doc["tr_psi2"] = profile.tr_psi2;
      doc["r_sigma"] = profile.variance_ratio;
      doc["spectral_radius"] = sys.spectral_radius();
    }
    os << doc.dump() << '\n';
    return 0;
  }

  os << "N,gamma_exact";
  if (o.approx) os << ",gamma_approx";
  if (o.explain) os << ",tr_psi1,tr_psi2,r_sigma,spectral_radius";
  os << '\n';
  for (const ComplexityPoint& p : profile.grid) {
    os << p.samples << ',' << format_double(p.gamma_exact);
    if (o.approx) os << ',' << format_double(p.gamma_approx);
    if (o.explain) {
      os << ',' << format_double(profile.tr_psi1) << ',' << format_double(profile.tr_psi2)
         << ',' << format_double(profile.variance_ratio) << ','
         << format_double(sys.spectral_radius());
    }
    os << '\n';
  }
  return 0;
}

// --- secure / design -----------------------------------------------------

int run_secure(const Options& o, const LinearSystem& sys, std::ostream& out) {
  const SecurityRequirement req{o.gamma_c, o.tau_c, o.flops, o.lambda,
                                parse_key_mode(o.key_mode)};
  req.validate();
  const SecurityVerdict verdict = is_secure(sys, noise_of(o), req);
  const DecipherTime tau = deciphering_time(verdict.n_star, req);
  json doc = {{"secure", verdict.secure},
              {"witness_N", verdict.witness ? json(*verdict.witness) : json(nullptr)},
              {"n_star", verdict.n_star},
              {"tau_at_n_star_seconds",
               optional_number(std::isfinite(tau.seconds) ? std::optional(tau.seconds)
                                                          : std::nullopt)},
              {"log2_tau_at_n_star_seconds", tau.log2_seconds}};
  Sink sink(o.output, out);
  sink.stream() << doc.dump() << '\n';
  return verdict.secure ? kExitSecure : kExitUnsecure;
}

int run_design(const Options& o, const LinearSystem& sys, std::ostream& out) {
  const KeyMode mode = parse_key_mode(o.key_mode);
  const SecurityDesign design = min_lambda(sys, noise_of(o), o.gamma_c, o.tau_c, o.flops, mode);
  json doc = {{"lambda", design.lambda},
              {"n_star", design.n_star},
              {"key_mode", std::string(to_string(mode))}};
  Sink sink(o.output, out);
  sink.stream() << doc.dump() << '\n';
  return 0;
}

// --- identify ------------------------------------------------------------

int run_identify(const Options& o, const LinearSystem& sys, std::ostream& out) {
  const Index samples = to_samples(o.samples.value_or(1000));
  if (o.trials < 1) throw InputError("trials must be >= 1");
  const NoiseConfig noise = noise_of(o);
  AttackOptions attack;
  if (!o.x0.empty()) {
    attack.initial_state = Eigen::Map<const Vector>(o.x0.data(), static_cast<Index>(o.x0.size()));
  }

  if (!o.dump.empty()) {
    std::ofstream dump = open_output(o.dump);
    write_trajectory_csv(dump, simulate_attack(sys, noise, samples, trial_seed(o.seed, 0), attack));
  }

  const ErrorStatistics stats =
      mean_error(sys, noise, samples, static_cast<std::size_t>(o.trials), o.seed, attack);
  std::optional<double> gamma;
  if (sys.is_stable() && o.sigma_w2 > 0.0) gamma = gamma_exact(sys, noise, samples);

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (want_json(o)) {
    json doc = {{"N", samples},
                {"trials", o.trials},
                {"mean_epsilon", stats.mean},
                {"stderr", stats.standard_error},
                {"gamma_exact", optional_number(gamma)}};
    os << doc.dump() << '\n';
  } else {
    os << "N,trials,mean_epsilon,stderr,gamma_exact\n"
       << samples << ',' << o.trials << ',' << format_double(stats.mean) << ','
       << format_double(stats.standard_error) << ',' << (gamma ? format_double(*gamma) : "")
       << '\n';
  }
  return 0;
}

// --- sweep ---------------------------------------------------------------

VariancePair parse_variance_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError("variance pair \"" + text + "\" must look like sigma_w2:sigma_u2");
  }
  try {
    std::size_t used_w = 0;
    std::size_t used_u = 0;
    const std::string w = text.substr(0, colon);
    const std::string u = text.substr(colon + 1);
    VariancePair pair{std::stod(w, &used_w), std::stod(u, &used_u)};
    if (used_w != w.size() || used_u != u.size()) throw std::invalid_argument(text);
    return pair;
  } catch (const std::logic_error&) {
    throw InputError("variance pair \"" + text + "\" is not numeric");
  }
}

ExperimentSpec sweep_spec(const Options& o) {
  ExperimentSpec spec = ExperimentSpec::defaults(parse_experiment_kind(o.kind));
  spec.master_seed = o.seed;
  if (!o.sample_grid.empty()) {
    spec.grid.clear();
    for (long long v : o.sample_grid) spec.grid.push_back(static_cast<Index>(v));
  }
  if (o.trials_given) spec.trials = static_cast<std::size_t>(std::max(0LL, o.trials));
  if (!o.variances.empty()) {
    spec.variances.clear();
    for (const std::string& v : o.variances) spec.variances.push_back(parse_variance_pair(v));
  }
  if (o.ladder) {
    spec.plants.kind = PlantSource::Kind::ladder;
    spec.plants.ladder_size = *o.ladder;
  } else if (o.plant_given) {
    if (o.plant == "paper") {
      spec.plants.kind = PlantSource::Kind::builtin;
    } else {
      spec.plants.kind = PlantSource::Kind::file;
      spec.plants.path = o.plant;
    }
  }
  return spec;
}

json rows_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const SummaryRow& s : r.summary) {
    rows.push_back({{"plant_id", s.plant_id ? json(*s.plant_id) : json("all")},
                    {"sigma_w_sq", s.variance.sigma_w_sq},
                    {"sigma_u_sq", s.variance.sigma_u_sq},
                    {"N", s.samples},
                    {"mean_epsilon", s.mean_epsilon},
                    {"stderr", s.standard_error},
                    {"gamma_exact", s.gamma_exact},
                    {"gamma_approx", s.gamma_approx}});
  }
  for (const GramianRow& g : r.gramian) {
    rows.push_back({{"plant_id", g.plant_id}, {"tr_psi1", g.tr_psi1}, {"j", g.j}, {"gamma", g.gamma}});
  }
  return rows;
}

int run_sweep(const Options& o, std::ostream& out) {
  const ExperimentSpec spec = sweep_spec(o);
  const ExperimentResult result = run_experiment(spec);
  const bool gramian = spec.kind == ExperimentKind::gramian_sweep;

  if (o.output.empty() || o.output == "-") {
    if (want_json(o)) {
      out << json({{"metadata", result.metadata}, {"rows", rows_json(result)}}).dump() << '\n';
    } else if (gramian) {
      write_gramian_csv(out, result);
    } else {
      write_summary_csv(out, result);
    }
    return 0;
  }

  const std::string& prefix = o.output;
  if (gramian) {
    std::ofstream f = open_output(prefix + ".gramian.csv");
    write_gramian_csv(f, result);
  } else {
    std::ofstream summary = open_output(prefix + ".summary.csv");
    write_summary_csv(summary, result);
    std::ofstream trials = open_output(prefix + ".trials.csv");
    write_trials_csv(trials, result);
  }
  std::ofstream meta = open_output(prefix + ".meta.json");
  meta << result.metadata.dump(2) << '\n';
  return 0;
}

// --- wiring --------------------------------------------------------------

void add_noise_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--sigma-w2", o.sigma_w2, "Process-noise variance sigma_w^2 (> 0 for bounds)")
      ->capture_default_str();
  cmd->add_option("--sigma-u2", o.sigma_u2, "Probing-input variance sigma_u^2")
      ->capture_default_str();
}

void add_requirement_flags(CLI::App* cmd, Options& o, bool with_lambda) {
  cmd->add_option("--gamma-c", o.gamma_c, "Acceptable estimation error gamma_c")->required();
  cmd->add_option("--tau-c", o.tau_c, "Plant life span in seconds")->required();
  cmd->add_option("--flops", o.flops, "Adversary throughput in FLOPS")->required();
  if (with_lambda) cmd->add_option("--lambda", o.lambda, "Security parameter in bits")->required();
  cmd->add_option("--key-mode", o.key_mode, "dynamic or static")
      ->check(CLI::IsMember({"dynamic", "static"}))
      ->capture_default_str();
}

using PlantCommand = std::function<int(const LinearSystem&)>;

struct Leaf {
  CLI::App* app;
  PlantCommand run;
};

std::vector<Leaf> add_plant_commands(CLI::App* parent, Options& o, std::ostream& out) {
  std::vector<Leaf> leaves;

  CLI::App* gamma = parent->add_subcommand("gamma", "Sample identifying complexity gamma(N)");
  add_noise_flags(gamma, o);
  auto* n_opt = gamma->add_option("--n", o.samples, "Sample count N (>= 2)");
  gamma->add_option("--n-grid", o.sample_grid, "Comma-separated sample counts")
      ->delimiter(',')
      ->excludes(n_opt);
  gamma->add_flag("--approx", o.approx, "Also print the large-j approximation");
  gamma->add_flag("--explain", o.explain, "Add Gramian traces, R_sigma and spectral radius");
  leaves.push_back({gamma, [&o, &out](const LinearSystem& s) { return run_gamma(o, s, out); }});

  CLI::App* secure = parent->add_subcommand(
      "secure", "Security verdict (exit 0 secure, 3 unsecure, 2 invalid input)");
  add_noise_flags(secure, o);
  add_requirement_flags(secure, o, true);
  leaves.push_back({secure, [&o, &out](const LinearSystem& s) { return run_secure(o, s, out); }});

  CLI::App* identify =
      parent->add_subcommand("identify", "Monte Carlo least-squares identification attack");
  add_noise_flags(identify, o);
  identify->add_option("--n", o.samples, "Sample count N (default 1000)");
  identify->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
  identify->add_option("--dump", o.dump, "Write the first trial's trajectory CSV here");
  identify->add_option("--x0", o.x0, "Comma-separated initial state (replaces x_0 = w_0)")
      ->delimiter(',');
  leaves.push_back(
      {identify, [&o, &out](const LinearSystem& s) { return run_identify(o, s, out); }});

  CLI::App* design =
      parent->add_subcommand("design", "Minimal security parameter lambda and N*");
  add_noise_flags(design, o);
  add_requirement_flags(design, o, false);
  leaves.push_back({design, [&o, &out](const LinearSystem& s) { return run_design(o, s, out); }});

  for (Leaf& leaf : leaves) leaf.app->fallthrough();
  return leaves;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sample identifying complexity of linear plants under least-squares "
               "identification attacks",
               "siclab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);
  app.fallthrough();

  app.add_option("--seed", o.seed, "Master seed (env SICLAB_SEED; flag wins)")
      ->envname("SICLAB_SEED")
      ->capture_default_str();
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", o.output, "Output path (sweep: file prefix); default stdout");
  auto* plant_opt = app.add_option("--plant", o.plant, "Plant JSON file or \"paper\"")
                        ->capture_default_str();
  app.add_flag("--dump-plant", o.dump_plant, "Print the plant as JSON and exit");

  std::vector<Leaf> open_loop = add_plant_commands(&app, o, out);

  CLI::App* closed = app.add_subcommand(
      "closed-loop", "Run gamma/secure/identify/design on A_F = A + B F");
  closed->add_option("--gain-file", o.gain_file, "JSON file {\"F\": [[...], ...]}")->required();
  closed->require_subcommand(1);
  closed->fallthrough();
  std::vector<Leaf> closed_loop = add_plant_commands(closed, o, out);

  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte Carlo / Gramian experiment");
  sweep->add_option("--kind", o.kind, "error-sweep, variance-grid or gramian-sweep")->required();
  sweep->add_option("--n-grid", o.sample_grid, "Comma-separated N (or j for gramian-sweep)")
      ->delimiter(',');
  auto* trials_opt = sweep->add_option("--trials", o.trials, "Trials per cell");
  sweep->add_option("--variances", o.variances, "Comma-separated sigma_w2:sigma_u2 pairs")
      ->delimiter(',');
  sweep->add_option("--ladder", o.ladder, "Use a random plant ladder of this size");
  sweep->fallthrough();

  std::vector<const char*> argv{"siclab"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  o.plant_given = plant_opt->count() > 0;
  o.trials_given = trials_opt->count() > 0;

  try {
    if (sweep->parsed()) return run_sweep(o, out);

    LinearSystem plant = load_plant(o.plant);
    if (closed->parsed()) plant = close_loop(plant, load_gain(o.gain_file));

    if (o.dump_plant) {
      Sink sink(o.output, out);
      sink.stream() << plant_to_json(plant) << '\n';
      return 0;
    }

    for (const auto* leaves : {&open_loop, &closed_loop}) {
      for (const Leaf& leaf : *leaves) {
        if (leaf.app->parsed()) return leaf.run(plant);
      }
    }
    err << app.help();
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace siclab::cli
