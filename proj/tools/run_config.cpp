#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "medrec/error.hpp"

namespace medrec::cli {
namespace {

template <typename Int>
Int parse_int(const std::string& text, const std::string& source, int line) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(source, static_cast<std::size_t>(line), "invalid integer '" + text + "'");
  return v;
}

double number(const std::string& text, const std::string& source) {
  return parse_double(text, source, 0);
}

}  // namespace

void RunConfig::validate() const {
  if (grid < StaggeredGrid::kMinCells)
    throw InvalidArgument("grid must be at least " + std::to_string(StaggeredGrid::kMinCells));
  if (!(noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(cphi > 0.0)) throw InvalidArgument("cphi must be positive");
  for (const auto* p : {&alpha_sigma, &beta_sigma, &alpha_mu, &beta_mu})
    if (*p && !(**p >= 0.0)) throw InvalidArgument("regularization weights must be >= 0");
  if (oversample < 1) throw InvalidArgument("oversample must be >= 1");
  if (max_outer < 1) throw InvalidArgument("max-outer must be >= 1");
}

void apply_config(RunConfig& cfg, const KeyValues& kv, const std::string& source) {
  const auto version = kv.find("version");
  if (version == kv.end()) throw ParseError(source, 0, "missing 'version' key");
  if (version->second != std::to_string(kConfigVersion))
    throw ParseError(source, 0, "unsupported config version '" + version->second + "'");
  for (const auto& [key, value] : kv) {
    if (key == "version") continue;
    if (key == "example") cfg.example = value;
    else if (key == "geometry") cfg.geometry = value;
    else if (key == "grid") cfg.grid = parse_int<int>(value, source, 0);
    else if (key == "noise") cfg.noise = number(value, source);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(value, source, 0);
    else if (key == "theta") cfg.theta = number(value, source);
    else if (key == "cphi") cfg.cphi = number(value, source);
    else if (key == "alpha_sigma") cfg.alpha_sigma = number(value, source);
    else if (key == "beta_sigma") cfg.beta_sigma = number(value, source);
    else if (key == "alpha_mu") cfg.alpha_mu = number(value, source);
    else if (key == "beta_mu") cfg.beta_mu = number(value, source);
    else if (key == "oversample") cfg.oversample = parse_int<int>(value, source, 0);
    else if (key == "max_outer") cfg.max_outer = parse_int<int>(value, source, 0);
    else if (key == "out") cfg.out = value;
    else throw ParseError(source, 0, "unknown config key '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  apply_config(cfg, read_key_values(in, path.string()), path.string());
}

KeyValues to_key_values(const RunConfig& cfg) {
  KeyValues kv;
  kv["version"] = std::to_string(kConfigVersion);
  if (cfg.geometry.empty()) kv["example"] = cfg.example;
  else kv["geometry"] = cfg.geometry.string();
  kv["grid"] = std::to_string(cfg.grid);
  kv["noise"] = format_double(cfg.noise);
  kv["seed"] = std::to_string(cfg.seed);
  kv["theta"] = format_double(cfg.theta);
  kv["cphi"] = format_double(cfg.cphi);
  if (cfg.alpha_sigma) kv["alpha_sigma"] = format_double(*cfg.alpha_sigma);
  if (cfg.beta_sigma) kv["beta_sigma"] = format_double(*cfg.beta_sigma);
  if (cfg.alpha_mu) kv["alpha_mu"] = format_double(*cfg.alpha_mu);
  if (cfg.beta_mu) kv["beta_mu"] = format_double(*cfg.beta_mu);
  kv["oversample"] = std::to_string(cfg.oversample);
  kv["max_outer"] = std::to_string(cfg.max_outer);
  return kv;
}

ExampleSpec load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open geometry file '" + path.string() + "'");
  const std::string source = path.string();
  ExampleSpec spec;
  spec.name = path.stem().string();
  std::string line;
  int number_of_line = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto num = [&](std::size_t k) { return parse_double(tok[k], source, number_of_line); };
    auto fail = [&](const std::string& what) {
      throw ParseError(source, static_cast<std::size_t>(number_of_line), what);
    };
    const std::string& head = tok[0];
    if ((head == "sigma_background" || head == "mu_background") && tok.size() == 2) {
      (head == "sigma_background" ? spec.sigma_background : spec.mu_background) = num(1);
    } else if (head == "excitations" && tok.size() == 2) {
      spec.excitation_count = parse_int<int>(tok[1], source, number_of_line);
    } else if (head == "reconstruct_mu" && tok.size() == 2) {
      spec.reconstruct_mu = parse_int<int>(tok[1], source, number_of_line) != 0;
    } else if (head == "sigma" || head == "mu") {
      auto& list = head == "sigma" ? spec.sigma_inclusions : spec.mu_inclusions;
      if (tok.size() == 6 && tok[1] == "square") list.push_back(Square{num(2), num(3), num(4), num(5)});
      else if (tok.size() == 7 && tok[1] == "ring")
        list.push_back(SquareRing{num(2), num(3), num(4), num(5), num(6)});
      else fail("expected '" + head + " square cx cy width value' or '" + head +
                " ring cx cy outer inner value'");
    } else {
      fail("unrecognized directive '" + head + "'");
    }
  }
  spec.validate();
  return spec;
}

ExampleSpec resolve_example(const RunConfig& cfg) {
  if (!cfg.geometry.empty()) return load_geometry(cfg.geometry);
  return make_example(cfg.example);
}

RegParams resolve_params(const RunConfig& cfg, const ExampleSpec& spec) {
  RegParams p = cfg.noise > 0.0 ? spec.noisy_params : spec.exact_params;
  if (cfg.alpha_sigma) p.alpha_sigma = *cfg.alpha_sigma;
  if (cfg.beta_sigma) p.beta_sigma = *cfg.beta_sigma;
  if (cfg.alpha_mu) p.alpha_mu = *cfg.alpha_mu;
  if (cfg.beta_mu) p.beta_mu = *cfg.beta_mu;
  return p;
}

}  // namespace medrec::cli
