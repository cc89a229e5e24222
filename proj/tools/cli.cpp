#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "medrec/dsm.hpp"
#include "medrec/error.hpp"
#include "medrec/experiments.hpp"
#include "medrec/field_io.hpp"
#include "medrec/optimizer.hpp"
#include "run_config.hpp"

namespace medrec::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> example;
  std::optional<std::string> geometry;
  std::optional<int> grid;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::optional<double> cphi;
  std::optional<double> alpha_sigma;
  std::optional<double> beta_sigma;
  std::optional<double> alpha_mu;
  std::optional<double> beta_mu;
  std::optional<int> oversample;
  std::optional<int> max_outer;
  std::optional<std::string> out;
  // evaluate only
  std::optional<std::string> truth_sigma;
  std::optional<std::string> truth_mu;
  std::optional<std::string> recon_sigma;
  std::optional<std::string> recon_mu;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Flat key=value config file (flags override it)");
  sub->add_option("--example", f.example, "Built-in example: ex1, ex2_1, ex2_2, ex3, ex4");
  sub->add_option("--geometry", f.geometry, "Custom geometry file instead of --example");
  sub->add_option("--grid", f.grid, "Cells per side N");
  sub->add_option("--noise", f.noise, "Relative noise level epsilon");
  sub->add_option("--seed", f.seed, "Noise seed");
  sub->add_option("--theta", f.theta, "DSM cut-off in (0, 1)");
  sub->add_option("--cphi", f.cphi, "DSM initial-guess scale");
  sub->add_option("--alpha-sigma", f.alpha_sigma, "H1 weight for sigma");
  sub->add_option("--beta-sigma", f.beta_sigma, "L1 weight for sigma");
  sub->add_option("--alpha-mu", f.alpha_mu, "H1 weight for mu");
  sub->add_option("--beta-mu", f.beta_mu, "L1 weight for mu");
  sub->add_option("--oversample", f.oversample, "Refinement factor for data synthesis");
  sub->add_option("--max-outer", f.max_outer, "Outer ADI iterations");
  sub->add_option("--out", f.out, "Run directory");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (f.config) {
    load_config_file(cfg, *f.config);
  } else if (f.out && fs::exists(fs::path(*f.out) / "config.txt")) {
    load_config_file(cfg, fs::path(*f.out) / "config.txt");
  }
  if (f.example) {
    cfg.example = *f.example;
    cfg.geometry.clear();
  }
  if (f.geometry) cfg.geometry = *f.geometry;
  if (f.grid) cfg.grid = *f.grid;
  if (f.noise) cfg.noise = *f.noise;
  if (f.seed) cfg.seed = *f.seed;
  if (f.theta) cfg.theta = *f.theta;
  if (f.cphi) cfg.cphi = *f.cphi;
  if (f.alpha_sigma) cfg.alpha_sigma = f.alpha_sigma;
  if (f.beta_sigma) cfg.beta_sigma = f.beta_sigma;
  if (f.alpha_mu) cfg.alpha_mu = f.alpha_mu;
  if (f.beta_mu) cfg.beta_mu = f.beta_mu;
  if (f.oversample) cfg.oversample = *f.oversample;
  if (f.max_outer) cfg.max_outer = *f.max_outer;
  if (f.out) cfg.out = *f.out;
  cfg.validate();
  if (!cfg.geometry.empty() && !fs::exists(cfg.geometry))
    throw InvalidArgument("geometry file '" + cfg.geometry.string() + "' does not exist");
  return cfg;
}

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw InvalidArgument("--out is required");
}

void prepare_out(const RunConfig& cfg) {
  require_out(cfg);
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out))
    throw Error("cannot create output directory '" + cfg.out.string() + "'");
  std::ofstream config(cfg.out / "config.txt");
  if (!config) throw Error("cannot write to '" + cfg.out.string() + "'");
  write_key_values(config, to_key_values(cfg));
}

fs::path measurement_path(const RunConfig& cfg, std::size_t e) {
  return cfg.out / ("measurement_" + std::to_string(e + 1) + ".txt");
}

ScalarField load_required(const fs::path& path, const char* hint) {
  if (!fs::exists(path))
    throw InvalidArgument("missing '" + path.string() + "' (" + hint + ")");
  return load_scalar_field(path);
}

std::vector<MeasurementSet> load_data(const RunConfig& cfg, const ExampleSpec& spec) {
  std::vector<MeasurementSet> data;
  for (int e = 0; e < spec.excitation_count; ++e) {
    const fs::path path = measurement_path(cfg, static_cast<std::size_t>(e));
    if (!fs::exists(path))
      throw InvalidArgument("missing measurement file '" + path.string() + "'; run generate first");
    data.push_back(load_measurement(path));
    if (data.back().neumann.n() != data.front().neumann.n())
      throw InvalidArgument("measurement files disagree on the grid size");
  }
  return data;
}

// mu is held at its known value in examples that do not reconstruct it.
ScalarField known_mu(const ExampleSpec& spec, const StaggeredGrid& grid) {
  return rasterize(spec.mu_inclusions, spec.mu_background, grid);
}

ScalarField mask_field(const SubdomainMask& mask, const StaggeredGrid& grid) {
  ScalarField f(grid);
  auto v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = mask[k] ? 1.0 : 0.0;
  return f;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ExampleSpec spec = resolve_example(cfg);
  const StaggeredGrid grid(cfg.grid);
  const CoefficientPair truth = rasterize_truth(spec, grid);
  for (const auto* list : {&spec.sigma_inclusions, &spec.mu_inclusions})
    for (const Shape& s : *list)
      if (rasterize({s}, 0.0, grid).max() == 0.0)
        err << "warning: an inclusion covers no cell center at N=" << cfg.grid << '\n';
  const auto excitations = default_excitations(grid, spec.excitation_count);
  auto data = generate_measurements(truth.sigma, truth.mu, excitations, cfg.oversample);
  for (std::size_t e = 0; e < data.size(); ++e)
    data[e].dirichlet = add_noise(data[e].dirichlet, cfg.noise, cfg.seed + e);

  prepare_out(cfg);
  save_field(cfg.out / "truth_sigma.field", truth.sigma);
  save_field(cfg.out / "truth_mu.field", truth.mu);
  for (std::size_t e = 0; e < data.size(); ++e) save_measurement(measurement_path(cfg, e), data[e]);
  out << "generate: " << spec.name << " N=" << cfg.grid << " noise=" << cfg.noise << ", "
      << data.size() << " measurement set(s) in " << cfg.out.string() << '\n';
  return kOk;
}

struct InitialGuess {
  CoefficientPair q;
  std::vector<std::string> warnings;
};

InitialGuess compute_dsm(const RunConfig& cfg, const ExampleSpec& spec,
                         const std::vector<MeasurementSet>& data) {
  DsmConfig dc;
  dc.theta = cfg.theta;
  dc.c_phi = cfg.cphi;
  dc.background_sigma = spec.sigma_background;
  dc.background_mu = spec.mu_background;
  dc.oversample = cfg.oversample;
  dc.box_sigma = RegConfig{0.0, 0.0, spec.q_lo, spec.q_hi};
  dc.box_mu = dc.box_sigma;
  const DsmResult r = run_dsm(data, dc);
  const StaggeredGrid& grid = r.initial_sigma.grid();

  save_field(cfg.out / "phi_sigma.field", r.index.phi_sigma);
  save_field(cfg.out / "phi_mu.field", r.index.phi_mu);
  save_field(cfg.out / "mask_sigma.field", mask_field(r.mask_sigma, grid));
  save_field(cfg.out / "mask_mu.field", mask_field(r.mask_mu, grid));
  InitialGuess g{{r.initial_sigma, spec.reconstruct_mu ? r.initial_mu : known_mu(spec, grid)},
                 r.warnings};
  save_field(cfg.out / "init_sigma.field", g.q.sigma);
  save_field(cfg.out / "init_mu.field", g.q.mu);
  return g;
}

int cmd_dsm(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_out(cfg);
  const ExampleSpec spec = resolve_example(cfg);
  const auto data = load_data(cfg, spec);
  prepare_out(cfg);
  const InitialGuess g = compute_dsm(cfg, spec, data);
  for (const auto& w : g.warnings) err << "warning: " << w << '\n';
  out << "dsm: theta=" << cfg.theta << " c_phi=" << cfg.cphi << ", index fields and initial "
      << "guesses written to " << cfg.out.string() << '\n';
  return kOk;
}

bool monotone(const std::vector<double>& j) {
  for (std::size_t k = 1; k < j.size(); ++k)
    if (j[k] > j[k - 1] + 1e-10 * (1.0 + j.front())) return false;
  return true;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_out(cfg);
  const ExampleSpec spec = resolve_example(cfg);
  const auto data = load_data(cfg, spec);
  prepare_out(cfg);

  CoefficientPair q0{ScalarField(data.front().neumann.grid()),
                     ScalarField(data.front().neumann.grid())};
  if (fs::exists(cfg.out / "init_sigma.field") && fs::exists(cfg.out / "init_mu.field")) {
    q0 = {load_scalar_field(cfg.out / "init_sigma.field"),
          load_scalar_field(cfg.out / "init_mu.field")};
  } else {
    InitialGuess g = compute_dsm(cfg, spec, data);
    for (const auto& w : g.warnings) err << "warning: " << w << '\n';
    q0 = std::move(g.q);
  }

  const RegParams params = resolve_params(cfg, spec);
  AdiConfig ac;
  ac.max_outer = cfg.max_outer;
  ac.reg_sigma = spec.reg_sigma(params);
  ac.reg_mu = spec.reg_mu(params);
  ac.update_mu = spec.reconstruct_mu;
  const ReconstructionReport rep = adi_reconstruct(data, q0, ac);

  save_field(cfg.out / "recon_sigma.field", rep.coefficients.sigma);
  save_field(cfg.out / "recon_mu.field", rep.coefficients.mu);

  const bool is_monotone = monotone(rep.j_history);
  const auto breg = bregman_diagnostics(rep);
  const bool bregman_ok = std::all_of(breg.begin(), breg.end(), [](const BregmanCheck& b) {
    return b.holds && b.bregman >= -1e-10;
  });
  KeyValues kv;
  kv["stop_reason"] = to_string(rep.stop_reason);
  kv["outer_iterations"] = std::to_string(rep.iterations.size());
  kv["j_initial"] = format_double(rep.j_history.front());
  kv["j_final"] = format_double(rep.j_history.back());
  kv["monotone"] = is_monotone ? "true" : "false";
  kv["bregman_bound"] = bregman_ok ? "true" : "false";
  kv["final_state_residual"] = format_double(rep.final_state_residual);
  kv["final_coefficient_residual"] = format_double(rep.final_coefficient_residual);
  kv["joint_state_residual"] = format_double(rep.joint_state_residual);
  kv["alpha_sigma"] = format_double(params.alpha_sigma);
  kv["beta_sigma"] = format_double(params.beta_sigma);
  kv["alpha_mu"] = format_double(params.alpha_mu);
  kv["beta_mu"] = format_double(params.beta_mu);
  if (!rep.failure_message.empty()) kv["failure"] = rep.failure_message;
  std::string history;
  for (double j : rep.j_history) history += (history.empty() ? "" : " ") + format_double(j);
  kv["j_history"] = history;
  {
    std::ofstream report(cfg.out / "report.txt");
    if (!report) throw Error("cannot write report.txt");
    write_key_values(report, kv);
  }

  out << "reconstruct: " << rep.iterations.size() << " outer iterations, stop "
      << to_string(rep.stop_reason) << ", J " << rep.j_history.front() << " -> "
      << rep.j_history.back() << '\n';
  if (rep.stop_reason == StopReason::subproblem_failure) {
    err << "error: " << rep.failure_message << '\n';
    return kNumericalFailure;
  }
  if (!is_monotone) {
    err << "error: objective history is not monotone\n";
    return kNumericalFailure;
  }
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  const bool explicit_files = f.truth_sigma && f.truth_mu && f.recon_sigma && f.recon_mu;
  if (!explicit_files) require_out(cfg);
  auto pick = [&](const std::optional<std::string>& flag, const char* name) {
    return flag ? fs::path(*flag) : cfg.out / name;
  };
  const CoefficientPair truth{load_required(pick(f.truth_sigma, "truth_sigma.field"), "truth"),
                              load_required(pick(f.truth_mu, "truth_mu.field"), "truth")};
  const CoefficientPair recon{
      load_required(pick(f.recon_sigma, "recon_sigma.field"), "run reconstruct first"),
      load_required(pick(f.recon_mu, "recon_mu.field"), "run reconstruct first")};
  const ExampleSpec spec = resolve_example(cfg);
  const Metrics m = compute_metrics(recon, truth, spec.sigma_background, spec.mu_background);
  const KeyValues kv = metrics_report(m);
  if (!cfg.out.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    std::ofstream file(cfg.out / "metrics.txt");
    if (!file) throw Error("cannot write metrics.txt");
    write_key_values(file, kv);
  }
  write_key_values(out, kv);
  return kOk;
}

int cmd_render(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  if (!fs::is_directory(cfg.out))
    throw InvalidArgument("run directory '" + cfg.out.string() + "' does not exist");
  std::vector<fs::path> fields;
  for (const auto& entry : fs::directory_iterator(cfg.out))
    if (entry.is_regular_file() && entry.path().extension() == ".field")
      fields.push_back(entry.path());
  std::sort(fields.begin(), fields.end());
  for (const auto& path : fields) {
    fs::path image = path;
    image.replace_extension(".pgm");
    save_pgm(image, load_scalar_field(path));
  }
  out << "render: " << fields.size() << " image(s) in " << cfg.out.string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage reconstruction of diffusion and absorption coefficients"};
  app.name("medrec");
  app.require_subcommand(1);
  Flags f;
  auto* generate = app.add_subcommand("generate", "Synthesize truth fields and boundary data");
  auto* dsm = app.add_subcommand("dsm", "Direct sampling indices and initial guesses");
  auto* reconstruct = app.add_subcommand("reconstruct", "Alternating least-squares reconstruction");
  auto* evaluate = app.add_subcommand("evaluate", "Compare reconstruction against truth");
  auto* render = app.add_subcommand("render", "Write a PGM image for every field in --out");
  for (auto* sub : {generate, dsm, reconstruct, evaluate, render}) add_common_options(sub, f);
  evaluate->add_option("--truth-sigma", f.truth_sigma, "Truth sigma field file");
  evaluate->add_option("--truth-mu", f.truth_mu, "Truth mu field file");
  evaluate->add_option("--recon-sigma", f.recon_sigma, "Reconstructed sigma field file");
  evaluate->add_option("--recon-mu", f.recon_mu, "Reconstructed mu field file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const RunConfig cfg = resolve(f);
    if (generate->parsed()) return cmd_generate(cfg, out, err);
    if (dsm->parsed()) return cmd_dsm(cfg, out, err);
    if (reconstruct->parsed()) return cmd_reconstruct(cfg, out, err);
    if (evaluate->parsed()) return cmd_evaluate(cfg, f, out);
    return cmd_render(cfg, out);
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IncompatibleProblem& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace medrec::cli
