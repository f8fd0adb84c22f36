#include "modesift/tim.hpp"

#include "modesift/error.hpp"

#include <cmath>
#include <numbers>

namespace modesift::tim {

double curve(std::size_t n, std::size_t k, double t) {
  require(n >= 1 && k < n, ErrorCode::InvalidArgument, "curve index must satisfy 0 <= k < n");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::sin(std::numbers::pi * kk * t + std::numbers::pi * (nn - kk) / (2.0 * nn));
}

Eigen::VectorXd curve_coordinates(std::size_t n, double t) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) f(static_cast<Eigen::Index>(k - 1)) = curve(n, k, t);
  return f;
}

TimModel fit(const FrameSequence& seq) {
  const std::size_t n = seq.frame_count();
  require(n >= 3, ErrorCode::TooFewFrames, "temporal interpolation needs at least three frames");
  const auto frames = seq.as_matrix();

  TimModel model;
  model.source_frames = n;
  model.rows = seq.rows();
  model.cols = seq.cols();
  model.fps = seq.fps();
  model.mean_frame = frames.rowwise().mean();
  const Eigen::MatrixXd centered = frames.colwise() - model.mean_frame;

  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd coords(nn - 1, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    coords.col(i) = curve_coordinates(n, static_cast<double>(i + 1) / static_cast<double>(n));
  }

  model.degenerate = centered.cwiseAbs().maxCoeff() == 0.0;
  if (model.degenerate) {
    model.basis_map = Eigen::MatrixXd::Zero(centered.rows(), nn - 1);
  } else {
    // min_B ||X - B F||_F  <=>  F^T B^T = X^T in the least-squares sense.
    model.basis_map =
        coords.transpose().colPivHouseholderQr().solve(centered.transpose()).transpose();
  }
  const Eigen::MatrixXd residual = centered - model.basis_map * coords;
  model.residuals.resize(n);
  for (Eigen::Index i = 0; i < nn; ++i) {
    model.residuals[static_cast<std::size_t>(i)] = residual.col(i).norm();
  }
  return model;
}

FrameSequence synthesize(const TimModel& model, std::size_t n_out) {
  require(n_out >= 2, ErrorCode::InvalidArgument, "synthesis needs at least two output frames");
  const auto m = model.mean_frame.size();
  Eigen::MatrixXd out(m, static_cast<Eigen::Index>(n_out));
  for (std::size_t j = 1; j <= n_out; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n_out);
    out.col(static_cast<Eigen::Index>(j - 1)) =
        model.mean_frame + model.basis_map * curve_coordinates(model.source_frames, t);
  }
  const double fps = model.fps * static_cast<double>(n_out) / static_cast<double>(model.source_frames);
  return FrameSequence::from_stack(model.rows, model.cols, out, fps);
}

std::size_t grid_position(std::size_t n_source, std::size_t n_out, std::size_t j) {
  require(n_source >= 1 && n_out >= 1 && j >= 1 && j <= n_out, ErrorCode::InvalidArgument,
          "grid position needs 1 <= j <= n_out");
  if (n_out == 1) return 1;
  return 1 + ((j - 1) * (n_source - 1)) / (n_out - 1);
}

std::vector<std::size_t> grid_positions(std::size_t n_source, std::size_t n_out) {
  std::vector<std::size_t> pos(n_out);
  for (std::size_t j = 1; j <= n_out; ++j) pos[j - 1] = grid_position(n_source, n_out, j);
  return pos;
}

}  // namespace modesift::tim
