#include "modesift/analysis.hpp"

#include "modesift/error.hpp"
#include "modesift/tim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace modesift::analysis {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ModeSpectrum mode_frequencies(const dmd::DmdDecomposition& d) {
  require(d.fps > 0.0, ErrorCode::InvalidArgument, "fps must be positive");
  ModeSpectrum s;
  const auto r = static_cast<std::size_t>(d.eigenvalues.size());
  s.frequency_hz.resize(r);
  s.growth_rate.resize(r);
  s.zero_eigenvalue.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const std::complex<double> mu = d.eigenvalues(static_cast<Eigen::Index>(i));
    if (mu == std::complex<double>{0.0, 0.0}) {
      s.frequency_hz[i] = d.fps / 2.0;
      s.growth_rate[i] = -std::numeric_limits<double>::infinity();
      s.zero_eigenvalue[i] = true;
      continue;
    }
    const std::complex<double> l = std::log(mu);
    s.frequency_hz[i] = std::min(std::abs(l.imag()) / (2.0 * std::numbers::pi) * d.fps, d.fps / 2.0);
    s.growth_rate[i] = l.real() * d.fps;
  }
  return s;
}

SpectralHistogram SpectralHistogram::empty(double fps, double bin_width) {
  require(fps > 0.0 && std::isfinite(fps), ErrorCode::InvalidArgument, "fps must be positive");
  require(bin_width > 0.0 && std::isfinite(bin_width), ErrorCode::InvalidArgument,
          "bin width must be positive");
  SpectralHistogram h;
  h.fps = fps;
  h.bin_width = bin_width;
  const double nyquist = fps / 2.0;
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(nyquist / bin_width - 1e-12)));
  h.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b < bins; ++b) h.bin_edges[b] = static_cast<double>(b) * bin_width;
  h.bin_edges[bins] = nyquist;
  h.energy.assign(bins, 0.0);
  return h;
}

std::size_t SpectralHistogram::bin_of(double frequency_hz) const {
  const std::size_t bins = energy.size();
  if (!(frequency_hz > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(std::floor(frequency_hz / bin_width));
  return std::min(b, bins - 1);
}

void SpectralHistogram::add(const dmd::DmdDecomposition& d) { add(d, d.amplitudes); }

void SpectralHistogram::add(const dmd::DmdDecomposition& d, const Eigen::VectorXcd& amplitudes) {
  require(d.fps == fps, ErrorCode::MixedFps, "decomposition fps differs from histogram fps");
  require(amplitudes.size() == d.rank, ErrorCode::LengthMismatch,
          "amplitude vector length != rank");
  const ModeSpectrum s = mode_frequencies(d);
  for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
    energy[bin_of(s.frequency_hz[i])] += std::abs(amplitudes(static_cast<Eigen::Index>(i)));
  }
  ++n_sequences;
}

void SpectralHistogram::merge(const SpectralHistogram& other) {
  require(other.fps == fps, ErrorCode::MixedFps, "cannot merge histograms with different fps");
  require(other.bin_width == bin_width && other.energy.size() == energy.size(),
          ErrorCode::LengthMismatch, "cannot merge histograms with different binning");
  for (std::size_t b = 0; b < energy.size(); ++b) energy[b] += other.energy[b];
  n_sequences += other.n_sequences;
}

double SpectralHistogram::total() const {
  double t = 0.0;
  for (double e : energy) t += e;
  return t;
}

SpectralHistogram spectral_histogram(const std::vector<dmd::DmdDecomposition>& decomps,
                                     double bin_width) {
  require(!decomps.empty(), ErrorCode::InvalidArgument, "no decompositions to aggregate");
  const double fps = decomps.front().fps;
  for (const auto& d : decomps) {
    require(d.fps == fps, ErrorCode::MixedFps, "decompositions have different frame rates");
  }
  SpectralHistogram h = SpectralHistogram::empty(fps, bin_width);
  for (const auto& d : decomps) h.add(d);
  return h;
}

TemporalProfile temporal_profile(const Eigen::VectorXcd& amplitudes, std::size_t original_n,
                                 ProfileMapping mapping,
                                 const std::optional<dmdsp::SparsityStructure>& structure) {
  const auto r = static_cast<std::size_t>(amplitudes.size());
  TemporalProfile p;
  p.frame_index.resize(original_n);
  for (std::size_t i = 0; i < original_n; ++i) p.frame_index[i] = i + 1;
  p.magnitude.assign(original_n, 0.0);

  if (mapping == ProfileMapping::SparseMask) {
    p.strategy = "sparse_mask";
    require(structure.has_value(), ErrorCode::InvalidArgument,
            "sparse_mask mapping requires a sparsity structure");
    require(structure->size() == r, ErrorCode::LengthMismatch, "structure length != rank");
    require(r <= original_n, ErrorCode::LengthMismatch, "more amplitudes than source frames");
    for (std::size_t i = 0; i < r; ++i) {
      if (!(*structure)[i]) p.magnitude[i] = std::abs(amplitudes(static_cast<Eigen::Index>(i)));
    }
  } else {
    p.strategy = "uniform_grid";
    // The shortened sequence had at least r + 1 frames.
    const std::size_t n_short = r + 1;
    require(original_n >= 1 && r >= 1, ErrorCode::LengthMismatch, "empty profile");
    for (std::size_t j = 1; j <= r; ++j) {
      const std::size_t pos = tim::grid_position(original_n, n_short, j);
      require(pos >= 1 && pos <= original_n, ErrorCode::LengthMismatch, "grid position out of range");
      p.magnitude[pos - 1] += std::abs(amplitudes(static_cast<Eigen::Index>(j - 1)));
    }
  }
  return p;
}

TemporalProfile temporal_profile(const dmd::DmdDecomposition& d, std::size_t original_n,
                                 ProfileMapping mapping,
                                 const std::optional<dmdsp::SparsityStructure>& structure) {
  if (mapping == ProfileMapping::UniformGrid) {
    // Map through the shortened sequence length (N + 1 frames) rather than r.
    const auto n_short = static_cast<std::size_t>(d.snapshot_count + 1);
    require(n_short >= 2, ErrorCode::LengthMismatch, "shortened sequence too short");
    TemporalProfile p;
    p.strategy = "uniform_grid";
    p.frame_index.resize(original_n);
    for (std::size_t i = 0; i < original_n; ++i) p.frame_index[i] = i + 1;
    p.magnitude.assign(original_n, 0.0);
    for (Eigen::Index j = 0; j < d.rank; ++j) {
      const std::size_t pos = tim::grid_position(original_n, n_short, static_cast<std::size_t>(j) + 1);
      p.magnitude[pos - 1] += std::abs(d.amplitudes(j));
    }
    return p;
  }
  return temporal_profile(d.amplitudes, original_n, mapping, structure);
}

GammaCurve gamma_percentage_curve(const std::vector<dmdsp::SparsityRecord>& records) {
  GammaCurve c;
  c.points.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      require(records[i].gamma > records[i - 1].gamma, ErrorCode::InvalidArgument,
              "records must be sorted by increasing gamma");
      if (records[i].percent_preserved > records[i - 1].percent_preserved) c.violations.push_back(i);
    }
    c.points.push_back({records[i].gamma, records[i].percent_preserved, records[i].loss});
  }
  return c;
}

void write_profile_csv(std::ostream& out, const TemporalProfile& p) {
  out << "frame_index,magnitude\n";
  for (std::size_t i = 0; i < p.frame_index.size(); ++i) {
    out << p.frame_index[i] << ',' << num(p.magnitude[i]) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const SpectralHistogram& h) {
  out << "# energy is the unweighted sum of |alpha| over " << h.n_sequences
      << " sequence(s); fps " << num(h.fps) << "\n";
  out << "bin_lo_hz,bin_hi_hz,energy\n";
  for (std::size_t b = 0; b < h.energy.size(); ++b) {
    out << num(h.bin_edges[b]) << ',' << num(h.bin_edges[b + 1]) << ',' << num(h.energy[b]) << '\n';
  }
}

void write_gamma_curve_csv(std::ostream& out, const GammaCurve& c) {
  out << "gamma,percent,loss\n";
  for (const auto& p : c.points) {
    out << num(p.gamma) << ',' << num(p.percent) << ',' << num(p.loss) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<dmdsp::SparsityRecord>& records) {
  out << "gamma,nnz,percent_preserved,loss,performance_loss_pct\n";
  for (const auto& r : records) {
    out << num(r.gamma) << ',' << r.nnz << ',' << num(r.percent_preserved) << ',' << num(r.loss)
        << ',' << num(r.performance_loss_pct) << '\n';
  }
}

}  // namespace modesift::analysis
