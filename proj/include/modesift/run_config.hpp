#pragma once

#include "modesift/dmdsp.hpp"
#include "modesift/eval.hpp"
#include "modesift/features.hpp"
#include "modesift/sampling.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace modesift {

// Everything needed to reproduce one CLI run. Serialized next to the outputs.
struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string log_level = "info";

  // sampling
  std::string strategy = "bl";
  double percent = 100.0;
  std::size_t fixed_length = 150;
  bool keep_original_frames = false;
  double rank_tol = dmd::kDefaultRankTol;

  // dmdsp
  double gamma_min = dmdsp::kDefaultGammaMin;
  double gamma_max = dmdsp::kDefaultGammaMax;
  int gamma_count = dmdsp::kDefaultGammaCount;
  double zero_tol = dmdsp::kDefaultZeroTol;
  double gamma_scale = dmdsp::kEightBitGammaScale;
  dmdsp::AdmmParams admm;

  // tim
  std::size_t tim_frames = 0;  // 0 = same as input

  // analysis
  double bin_width = 1.0;
  std::string profile_mapping = "sparse_mask";

  // features
  std::size_t blocks = 5;
  std::array<std::size_t, 3> radii{1, 1, 3};
  bool normalize_histograms = false;
  std::size_t resize_rows = 0;
  std::size_t resize_cols = 0;

  // evaluate
  std::string manifest;
  std::string protocol = "loso";
  std::string classifier = "reference";
  std::string predictions;
  double svm_c = 1e4;
  double svm_g = 0.5;

  friend bool operator==(const RunConfig&, const RunConfig&);

  sampling::SamplingConfig sampling_config() const;
  features::LbptopConfig lbptop_config() const;
  eval::ExperimentConfig experiment_config() const;
  std::vector<double> gamma_grid() const;
  dmdsp::SweepOptions sweep_options() const;
};

std::string to_json(const RunConfig& c);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& c, const std::filesystem::path& path);

}  // namespace modesift
