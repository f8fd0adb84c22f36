#pragma once

#include "modesift/seqio.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace modesift::features {

enum class Plane { XY = 0, XT = 1, YT = 2 };
inline constexpr std::size_t kPlaneCount = 3;

struct LbptopConfig {
  std::size_t blocks = 5;       // n_b x n_b x 1 grid
  std::size_t neighbors = 4;    // P per plane; only 4 is implemented
  std::array<std::size_t, 3> radii{1, 1, 3};  // R_x, R_y, R_t
  bool normalize = false;       // L1 per (block, plane) sub-histogram

  std::size_t bins() const { return neighbors * (neighbors - 1) + 3; }
  std::size_t dimension() const { return blocks * blocks * kPlaneCount * bins(); }
  std::size_t min_frames() const { return 2 * radii[2] + 1; }

  friend bool operator==(const LbptopConfig&, const LbptopConfig&) = default;
};

struct LbptopFeature {
  // block-major (row-major blocks), then plane (XY, XT, YT), then bin
  std::vector<double> values;
  LbptopConfig config;

  std::size_t offset(std::size_t block, Plane plane) const {
    return (block * kPlaneCount + static_cast<std::size_t>(plane)) * config.bins();
  }
};

// Bin index for every P-bit code: uniform codes (<= 2 circular transitions)
// get 0..P(P-1)+1 in increasing code order, the rest share the last bin.
std::vector<std::uint8_t> uniform_pattern_table(std::size_t neighbors);

int circular_transitions(std::uint32_t code, std::size_t bits);

// [start, end) of block i along an axis of length n split into n_b parts.
inline std::size_t block_start(std::size_t n, std::size_t n_b, std::size_t i) { return i * n / n_b; }

// Throws SequenceTooShort when n_f < 2 R_t + 1 and FrameTooSmall when a
// block is narrower than 2 max(R_x, R_y) + 1.
void validate(const FrameSequence& seq, const LbptopConfig& config);

LbptopFeature lbptop(const FrameSequence& seq, const LbptopConfig& config = {});

namespace serial {
LbptopFeature lbptop(const FrameSequence& seq, const LbptopConfig& config = {});
}

struct FeatureRow {
  std::string sample_id;
  std::string label;
  std::string subject_id;
  std::vector<double> values;
};

// sample_id,label,subject_id,f0..f{D-1}
void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

// "MSF1", u32 LE rows, u32 LE cols, then rows*cols f32 LE, row-major.
void write_feature_matrix(const std::filesystem::path& path, const std::vector<FeatureRow>& rows);
std::vector<std::vector<float>> read_feature_matrix(const std::filesystem::path& path);

}  // namespace modesift::features
