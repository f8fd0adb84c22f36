#pragma once

#include "modesift/seqio.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace modesift::tim {

// Sinusoidal coordinate k of an n-vertex path graph:
//   f_k^n(t) = sin(pi k t + pi (n - k) / (2 n)),  t in [1/n, 1].
// Sampled at t = i/n these are the path-graph Laplacian eigenvectors.
double curve(std::size_t n, std::size_t k, double t);

// Stacked coordinates (f_1^n(t), ..., f_{n-1}^n(t)).
Eigen::VectorXd curve_coordinates(std::size_t n, double t);

struct TimModel {
  Eigen::VectorXd mean_frame;   // M
  Eigen::MatrixXd basis_map;    // M x (n-1)
  std::size_t source_frames = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double fps = 1.0;
  std::vector<double> residuals;  // per source frame, ||x_i - B f(i/n)||
  bool degenerate = false;        // all source frames identical
};

// Least-squares map from path-graph coordinates to mean-removed frames.
TimModel fit(const FrameSequence& seq);

// Frames at t_j = j / n_out, j = 1..n_out, clamped to [0,1]. fps is scaled by
// n_out / n so the clip duration is unchanged.
FrameSequence synthesize(const TimModel& model, std::size_t n_out);

// Source frame (1-based) that synthesized frame j (1-based) stands for on an
// equispaced grid whose endpoints coincide with the first and last frames.
std::size_t grid_position(std::size_t n_source, std::size_t n_out, std::size_t j);
std::vector<std::size_t> grid_positions(std::size_t n_source, std::size_t n_out);

}  // namespace modesift::tim
