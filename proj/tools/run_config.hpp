#pragma once

// Run configuration shared by all subcommands: built-in defaults, then a flat
// key=value config file, then command-line flags.

#include <filesystem>
#include <optional>
#include <string>

#include "medrec/experiments.hpp"
#include "medrec/field_io.hpp"

namespace medrec::cli {

inline constexpr int kConfigVersion = 1;

struct RunConfig {
  std::string example = "ex1";
  std::filesystem::path geometry;  // custom geometry file; overrides `example`
  int grid = 50;
  double noise = 0.0;
  std::uint64_t seed = 1;
  double theta = 0.55;
  double cphi = 20.0;
  // Unset entries fall back to the example's parameter column for `noise`.
  std::optional<double> alpha_sigma;
  std::optional<double> beta_sigma;
  std::optional<double> alpha_mu;
  std::optional<double> beta_mu;
  int oversample = 2;
  int max_outer = 50;
  std::filesystem::path out;

  // Throws InvalidArgument for out-of-range values.
  void validate() const;
};

// Applies the keys of a config file. Requires `version = 1`; unknown keys and
// malformed values raise ParseError.
void apply_config(RunConfig& cfg, const KeyValues& kv, const std::string& source);
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
KeyValues to_key_values(const RunConfig& cfg);

// Geometry files hold one directive per line ('#' starts a comment):
//
//   sigma_background 1
//   mu_background 1
//   excitations 1|2
//   reconstruct_mu 0|1
//   sigma square <cx> <cy> <width> <value>
//   mu ring <cx> <cy> <outer> <inner> <value>
ExampleSpec load_geometry(const std::filesystem::path& path);

ExampleSpec resolve_example(const RunConfig& cfg);
RegParams resolve_params(const RunConfig& cfg, const ExampleSpec& spec);

}  // namespace medrec::cli
