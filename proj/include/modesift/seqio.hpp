#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace modesift {

// Ordered grayscale frames with intensities in [0,1].
//
// Storage is frame-major, then row-major within a frame, which is also the
// column layout of `as_matrix()`: column t is frame t vectorized row by row.
// Instances are immutable after construction.
class FrameSequence {
 public:
  FrameSequence(std::size_t rows, std::size_t cols, std::vector<double> values, double fps,
                std::string source_id = {});

  // Builds a sequence from an M x n_f stack (M = rows * cols). When `clamp`
  // is set, values are clipped into [0,1] first; otherwise out-of-range
  // values are rejected.
  static FrameSequence from_stack(std::size_t rows, std::size_t cols, const Eigen::MatrixXd& stack,
                                  double fps, std::string source_id = {}, bool clamp = true);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t frame_count() const noexcept { return frames_; }
  std::size_t pixels_per_frame() const noexcept { return rows_ * cols_; }
  double fps() const noexcept { return fps_; }
  const std::string& source_id() const noexcept { return source_id_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> frame(std::size_t t) const;
  double at(std::size_t t, std::size_t r, std::size_t c) const {
    return values_[(t * rows_ + r) * cols_ + c];
  }

  Eigen::Map<const Eigen::MatrixXd> as_matrix() const;

  FrameSequence with_fps(double fps) const;
  FrameSequence with_source_id(std::string id) const;

  // Returns the frames at the given indices, in order, with fps unchanged.
  FrameSequence select_frames(std::span<const std::size_t> indices) const;

  friend bool operator==(const FrameSequence& a, const FrameSequence& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t frames_;
  double fps_;
  std::string source_id_;
  std::vector<double> values_;
};

enum class SequenceFormat { RawTensor, ImageDir };

// Directories are image_dir, anything else raw_tensor.
SequenceFormat detect_format(const std::filesystem::path& path);

FrameSequence load_sequence(const std::filesystem::path& path, SequenceFormat format);
inline FrameSequence load_sequence(const std::filesystem::path& path) {
  return load_sequence(path, detect_format(path));
}

void write_sequence(const FrameSequence& seq, const std::filesystem::path& path,
                    SequenceFormat format);

// Bilinear resampling (pixel-center aligned, edge clamped). Identity when the
// target matches the source dimensions.
FrameSequence resize(const FrameSequence& seq, std::size_t rows, std::size_t cols);

// ITU-R BT.601 luma used when ingesting color images.
inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

// Shifted snapshot matrices: psi1.col(j) is the frame following psi0.col(j).
struct SnapshotPair {
  Eigen::MatrixXd psi0;
  Eigen::MatrixXd psi1;
  double fps = 1.0;

  Eigen::Index pixels() const { return psi0.rows(); }
  Eigen::Index columns() const { return psi0.cols(); }
};

// Builds the pair from an M x (N+1) stack of vectorized frames. Requires
// at least two columns and M >= N.
SnapshotPair snapshots_from_stack(const Eigen::MatrixXd& stack, double fps);

SnapshotPair to_snapshots(const FrameSequence& seq);

}  // namespace modesift
