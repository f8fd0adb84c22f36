#pragma once

#include "modesift/dmd.hpp"
#include "modesift/dmdsp.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace modesift::analysis {

struct ModeSpectrum {
  std::vector<double> frequency_hz;  // |Im(log mu)| / (2 pi) * fs, in [0, fs/2]
  std::vector<double> growth_rate;   // Re(log mu) * fs; -inf for mu = 0
  std::vector<bool> zero_eigenvalue;
};

ModeSpectrum mode_frequencies(const dmd::DmdDecomposition& d);

// Histogram of summed |alpha| over uniform frequency bins covering [0, fs/2].
// Bins are half-open [lo, hi) except the last, which is closed.
struct SpectralHistogram {
  double fps = 0.0;
  double bin_width = 1.0;
  std::vector<double> bin_edges;  // size bins + 1, last edge = fs/2
  std::vector<double> energy;
  std::size_t n_sequences = 0;

  static SpectralHistogram empty(double fps, double bin_width);

  std::size_t bin_of(double frequency_hz) const;
  void add(const dmd::DmdDecomposition& d);
  void add(const dmd::DmdDecomposition& d, const Eigen::VectorXcd& amplitudes);
  // Associative, exact merge of partial histograms with identical binning.
  void merge(const SpectralHistogram& other);
  double total() const;
};

inline constexpr double kDefaultBinWidth = 1.0;

// Throws MixedFps when decompositions disagree on frame rate.
SpectralHistogram spectral_histogram(const std::vector<dmd::DmdDecomposition>& decomps,
                                     double bin_width = kDefaultBinWidth);

enum class ProfileMapping { SparseMask, UniformGrid };

struct TemporalProfile {
  std::vector<std::size_t> frame_index;  // 1..original_n
  std::vector<double> magnitude;
  std::string strategy;
};

// sparse_mask: |alpha_i| at position i+1 unless structure[i]; uniform_grid:
// |alpha_j| of a shortened sequence placed at its equispaced source positions.
TemporalProfile temporal_profile(const Eigen::VectorXcd& amplitudes, std::size_t original_n,
                                 ProfileMapping mapping,
                                 const std::optional<dmdsp::SparsityStructure>& structure = {});
TemporalProfile temporal_profile(const dmd::DmdDecomposition& d, std::size_t original_n,
                                 ProfileMapping mapping,
                                 const std::optional<dmdsp::SparsityStructure>& structure = {});

struct GammaCurvePoint {
  double gamma = 0.0;
  double percent = 0.0;
  double loss = 0.0;
};

struct GammaCurve {
  std::vector<GammaCurvePoint> points;
  std::vector<std::size_t> violations;  // indices i where percent[i] > percent[i-1]
  bool monotone() const { return violations.empty(); }
};

GammaCurve gamma_percentage_curve(const std::vector<dmdsp::SparsityRecord>& records);

void write_profile_csv(std::ostream& out, const TemporalProfile& p);
void write_spectrum_csv(std::ostream& out, const SpectralHistogram& h);
void write_gamma_curve_csv(std::ostream& out, const GammaCurve& c);
void write_sweep_csv(std::ostream& out, const std::vector<dmdsp::SparsityRecord>& records);

}  // namespace modesift::analysis
