#pragma once

#include "modesift/dmd.hpp"
#include "modesift/dmdsp.hpp"
#include "modesift/seqio.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modesift::sampling {

enum class Strategy { Sparse, Uniform, UniformFixed, Random, Baseline };

std::string_view to_string(Strategy s);      // ss, us, us-star, ra, bl
Strategy strategy_from_string(std::string_view name);

// Sweep defaults for [0,1] frame sequences: gamma quoted in 8-bit units.
inline dmdsp::SweepOptions sequence_sweep_options() {
  dmdsp::SweepOptions o;
  o.gamma_scale = dmdsp::kEightBitGammaScale;
  return o;
}

struct SamplingConfig {
  Strategy strategy = Strategy::Baseline;
  double percent = 100.0;            // SS, US, RA
  std::size_t fixed_length = 150;    // US*
  std::uint64_t seed = 0;            // RA
  std::vector<double> gamma_grid = dmdsp::default_gamma_grid();
  dmdsp::SweepOptions sweep = sequence_sweep_options();
  double rank_tol = dmd::kDefaultRankTol;
  // SS only: keep the original frames at retained amplitude indices instead
  // of evolving the retained modes over a shortened time grid.
  bool keep_original_frames = false;
};

struct SampleResult {
  SampleResult(FrameSequence seq, Strategy s) : sequence(std::move(seq)), strategy(s) {}

  FrameSequence sequence;
  Strategy strategy = Strategy::Baseline;
  // SS bookkeeping
  std::optional<double> gamma;
  std::optional<int> nnz;
  std::optional<double> loss;
  std::optional<double> percent_preserved;
  std::optional<int> rank;
  std::optional<dmdsp::SparsityStructure> structure;
  // RA and SS keep-original-frames: source frame indices (0-based)
  std::vector<std::size_t> kept_indices;
};

// splitmix64; portable and bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// round(percent * n / 100)
std::size_t target_length(std::size_t n_frames, double percent);

SampleResult sparse_sample(const FrameSequence& seq, double percent,
                           const std::vector<double>& gamma_grid,
                           const dmdsp::SweepOptions& options = sequence_sweep_options(),
                           bool keep_original_frames = false,
                           double rank_tol = dmd::kDefaultRankTol);
SampleResult uniform_sample(const FrameSequence& seq, double percent);
SampleResult fixed_length_sample(const FrameSequence& seq, std::size_t n_out);
SampleResult random_sample(const FrameSequence& seq, double percent, std::uint64_t seed);
SampleResult baseline(const FrameSequence& seq);

// Sorted, duplicate-free subset of k indices from [0, n).
std::vector<std::size_t> random_indices(std::size_t n, std::size_t k, std::uint64_t seed);

SampleResult apply(const FrameSequence& seq, const SamplingConfig& config);

}  // namespace modesift::sampling
