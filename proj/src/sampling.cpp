#include "modesift/sampling.hpp"

#include "modesift/error.hpp"
#include "modesift/tim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace modesift::sampling {

namespace {

void check_percent(double percent) {
  require(percent > 0.0 && percent <= 100.0, ErrorCode::InvalidArgument,
          "percent must lie in (0, 100]");
}

double scaled_fps(const FrameSequence& seq, std::size_t n_out) {
  return seq.fps() * static_cast<double>(n_out) / static_cast<double>(seq.frame_count());
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Sparse: return "ss";
    case Strategy::Uniform: return "us";
    case Strategy::UniformFixed: return "us-star";
    case Strategy::Random: return "ra";
    case Strategy::Baseline: return "bl";
  }
  return "bl";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "ss") return Strategy::Sparse;
  if (name == "us") return Strategy::Uniform;
  if (name == "us-star") return Strategy::UniformFixed;
  if (name == "ra") return Strategy::Random;
  if (name == "bl") return Strategy::Baseline;
  fail(ErrorCode::InvalidArgument, "unknown sampling strategy '" + std::string(name) + "'");
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::size_t target_length(std::size_t n_frames, double percent) {
  return static_cast<std::size_t>(std::llround(percent * static_cast<double>(n_frames) / 100.0));
}

std::vector<std::size_t> random_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k <= n, ErrorCode::InvalidArgument, "cannot draw more indices than frames");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SampleResult sparse_sample(const FrameSequence& seq, double percent,
                           const std::vector<double>& gamma_grid,
                           const dmdsp::SweepOptions& options, bool keep_original_frames,
                           double rank_tol) {
  check_percent(percent);
  const SnapshotPair snap = to_snapshots(seq);
  const dmd::DmdDecomposition d = dmd::decompose(snap, rank_tol);

  SampleResult result{seq, Strategy::Sparse};
  dmd::ModeMask mask;
  Eigen::VectorXcd alpha;
  if (percent >= 100.0) {
    // Full preservation: plain DMD amplitudes, no sparsity promotion.
    mask = dmd::full_mask(d.rank);
    alpha = d.amplitudes;
    result.nnz = static_cast<int>(d.rank);
    result.loss = dmd::loss(d, alpha);
    result.percent_preserved = 100.0;
    result.structure = dmdsp::SparsityStructure(static_cast<std::size_t>(d.rank), false);
  } else {
    const auto records = dmdsp::gamma_sweep(d, gamma_grid, options);
    const dmdsp::SparsityRecord& rec = dmdsp::select_percentage(records, percent);
    mask = rec.retained_mask();
    alpha = rec.alpha_polished;
    result.gamma = rec.gamma;
    result.nnz = rec.nnz;
    result.loss = rec.loss;
    result.percent_preserved = rec.percent_preserved;
    result.structure = rec.structure;
  }
  result.rank = static_cast<int>(d.rank);

  const auto nnz = static_cast<std::size_t>(*result.nnz);
  require(nnz >= 2, ErrorCode::TooShort,
          "sparse sampling retained fewer than two modes (nnz = " + std::to_string(nnz) + ")");

  if (keep_original_frames) {
    // Amplitude index i stands for source frame i.
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) result.kept_indices.push_back(i);
    }
    result.sequence = seq.select_frames(result.kept_indices).with_fps(scaled_fps(seq, nnz));
    return result;
  }

  // Evolve the retained modes over nnz equispaced steps covering the N
  // snapshot interval; with every mode kept this is exactly psi_0..psi_{N-1}.
  const double step = static_cast<double>(d.snapshot_count) / static_cast<double>(nnz);
  std::vector<double> times(nnz);
  for (std::size_t j = 0; j < nnz; ++j) times[j] = step * static_cast<double>(j);
  const Eigen::MatrixXd frames = dmd::reconstruct_at(d, mask, times, alpha);
  result.sequence = FrameSequence::from_stack(seq.rows(), seq.cols(), frames,
                                              scaled_fps(seq, nnz), seq.source_id());
  return result;
}

SampleResult uniform_sample(const FrameSequence& seq, double percent) {
  check_percent(percent);
  const std::size_t n_out = std::max<std::size_t>(2, target_length(seq.frame_count(), percent));
  SampleResult r = fixed_length_sample(seq, n_out);
  r.strategy = Strategy::Uniform;
  return r;
}

SampleResult fixed_length_sample(const FrameSequence& seq, std::size_t n_out) {
  require(n_out >= 2, ErrorCode::InvalidArgument, "fixed length must be at least two frames");
  const tim::TimModel model = tim::fit(seq);
  return SampleResult{tim::synthesize(model, n_out).with_source_id(seq.source_id()),
                      Strategy::UniformFixed};
}

SampleResult random_sample(const FrameSequence& seq, double percent, std::uint64_t seed) {
  check_percent(percent);
  const std::size_t k = target_length(seq.frame_count(), percent);
  require(k >= 2, ErrorCode::TooShort, "random sampling would keep fewer than two frames");
  SampleResult r{seq, Strategy::Random};
  r.kept_indices = random_indices(seq.frame_count(), k, seed);
  r.sequence = seq.select_frames(r.kept_indices).with_fps(scaled_fps(seq, k));
  return r;
}

SampleResult baseline(const FrameSequence& seq) { return SampleResult{seq, Strategy::Baseline}; }

SampleResult apply(const FrameSequence& seq, const SamplingConfig& config) {
  switch (config.strategy) {
    case Strategy::Sparse:
      return sparse_sample(seq, config.percent, config.gamma_grid, config.sweep,
                           config.keep_original_frames, config.rank_tol);
    case Strategy::Uniform: return uniform_sample(seq, config.percent);
    case Strategy::UniformFixed: return fixed_length_sample(seq, config.fixed_length);
    case Strategy::Random: return random_sample(seq, config.percent, config.seed);
    case Strategy::Baseline: return baseline(seq);
  }
  return baseline(seq);
}

}  // namespace modesift::sampling
