#include "modesift/dmd.hpp"

#include "modesift/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace modesift::dmd {

namespace {

using cd = std::complex<double>;

constexpr double kSingularRcond = 64.0 * std::numeric_limits<double>::epsilon();

void check_mask(const DmdDecomposition& d, const ModeMask& mask) {
  require(static_cast<Index>(mask.size()) == d.rank, ErrorCode::LengthMismatch,
          "mode mask length must equal the decomposition rank");
  require(std::any_of(mask.begin(), mask.end(), [](bool b) { return b; }), ErrorCode::EmptyMask,
          "mask selects no modes");
}

std::vector<Index> selected(const ModeMask& mask) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

// Reorders every per-mode quantity by descending |alpha|, then |mu|.
void sort_modes(DmdDecomposition& d) {
  std::vector<Index> order(static_cast<std::size_t>(d.rank));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double aa = std::abs(d.amplitudes(a));
    const double ab = std::abs(d.amplitudes(b));
    if (aa != ab) return aa > ab;
    return std::abs(d.eigenvalues(a)) > std::abs(d.eigenvalues(b));
  });

  MatrixXcd modes(d.modes.rows(), d.rank);
  MatrixXcd y(d.rank, d.rank);
  MatrixXcd zstar(d.rank, d.rank);
  VectorXcd mu(d.rank);
  VectorXcd alpha(d.rank);
  for (Index k = 0; k < d.rank; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    modes.col(k) = d.modes.col(src);
    y.col(k) = d.eig_right.col(src);
    zstar.row(k) = d.eig_left_adjoint.row(src);
    mu(k) = d.eigenvalues(src);
    alpha(k) = d.amplitudes(src);
  }
  d.modes = std::move(modes);
  d.eig_right = std::move(y);
  d.eig_left_adjoint = std::move(zstar);
  d.eigenvalues = std::move(mu);
  d.amplitudes = std::move(alpha);
}

}  // namespace

MatrixXcd vandermonde(const VectorXcd& eigenvalues, Index columns) {
  MatrixXcd v(eigenvalues.size(), columns);
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    cd p{1.0, 0.0};
    for (Index k = 0; k < columns; ++k) {
      v(i, k) = p;
      p *= eigenvalues(i);
    }
  }
  return v;
}

MatrixXcd evolution_at(const VectorXcd& eigenvalues, const std::vector<double>& times) {
  MatrixXcd v(eigenvalues.size(), static_cast<Index>(times.size()));
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const cd mu = eigenvalues(i);
    const bool zero = mu == cd{0.0, 0.0};
    const cd log_mu = zero ? cd{} : std::log(mu);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double t = times[j];
      if (t == 0.0) {
        v(i, static_cast<Index>(j)) = 1.0;
      } else if (zero) {
        v(i, static_cast<Index>(j)) = 0.0;
      } else if (t == std::round(t)) {
        v(i, static_cast<Index>(j)) = std::pow(mu, static_cast<int>(t));
      } else {
        v(i, static_cast<Index>(j)) = std::exp(t * log_mu);
      }
    }
  }
  return v;
}

DmdDecomposition decompose(const SnapshotPair& snap, double rank_tol) {
  const MatrixXd& psi0 = snap.psi0;
  const MatrixXd& psi1 = snap.psi1;
  require(rank_tol > 0.0 && rank_tol < 1.0, ErrorCode::InvalidArgument,
          "rank_tol must lie in (0, 1)");
  require(psi0.rows() == psi1.rows() && psi0.cols() == psi1.cols(), ErrorCode::DimensionMismatch,
          "snapshot matrices differ in shape");
  require(psi0.cols() >= 1, ErrorCode::TooFewFrames, "need at least one snapshot pair");
  require(psi0.rows() >= psi0.cols(), ErrorCode::DimensionMismatch,
          "snapshot matrix must be tall (pixels >= snapshot pairs)");
  require(psi0.allFinite() && psi1.allFinite(), ErrorCode::DegenerateInput,
          "snapshot data contains non-finite values");

  const Index m = psi0.rows();
  const Index n = psi0.cols();

  // Economy SVD through a thin QR: Psi0 = Q R, R = U_r S V^*.
  Eigen::HouseholderQR<MatrixXd> qr(psi0);
  const MatrixXd r_factor = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const MatrixXd q_thin = qr.householderQ() * MatrixXd::Identity(m, n);
  Eigen::JacobiSVD<MatrixXd> svd(r_factor, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  require(sigma.size() > 0 && sigma(0) > std::numeric_limits<double>::min(),
          ErrorCode::DegenerateInput, "snapshot matrix is numerically zero");

  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > rank_tol * sigma(0)) ++rank;

  DmdDecomposition d;
  d.rank = rank;
  d.snapshot_count = n;
  d.fps = snap.fps;
  d.singular_values = sigma.head(rank);
  d.left_basis = q_thin * svd.matrixU().leftCols(rank);
  d.right_basis = svd.matrixV().leftCols(rank);
  d.snapshot_energy = psi0.squaredNorm();

  const MatrixXd reduced = d.singular_values.asDiagonal() * d.right_basis.transpose();
  d.residual_outside_basis = (psi0 - d.left_basis * reduced).squaredNorm();

  const VectorXd inv_sigma = d.singular_values.cwiseInverse();
  const MatrixXd f = (d.left_basis.transpose() * psi1) * d.right_basis * inv_sigma.asDiagonal();
  d.reduced_operator = f.cast<cd>();

  Eigen::EigenSolver<MatrixXd> eig(f, true);
  require(eig.info() == Eigen::Success, ErrorCode::EigFailure,
          "eigen-solver did not converge on the reduced operator");
  d.eigenvalues = eig.eigenvalues();
  d.eig_right = eig.eigenvectors();
  for (Index k = 0; k < rank; ++k) {
    const double nrm = d.eig_right.col(k).norm();
    require(nrm > 0.0, ErrorCode::EigFailure, "zero eigenvector");
    d.eig_right.col(k) /= nrm;
  }
  Eigen::FullPivLU<MatrixXcd> lu(d.eig_right);
  require(lu.isInvertible(), ErrorCode::EigFailure,
          "reduced operator is defective (eigenvectors are not independent)");
  d.eig_left_adjoint = lu.inverse();
  d.modes = d.left_basis.cast<cd>() * d.eig_right;

  const AmplitudeFit fit = optimal_amplitudes(d);
  d.amplitudes = fit.alpha;
  d.amplitude_fallback = fit.used_fallback;
  sort_modes(d);
  return d;
}

AmplitudeProblem amplitude_problem(const DmdDecomposition& d) {
  const MatrixXcd vand = vandermonde(d.eigenvalues, d.snapshot_count);
  AmplitudeProblem p;
  p.gram = (d.eig_right.adjoint() * d.eig_right).cwiseProduct((vand * vand.adjoint()).conjugate());
  const MatrixXcd inner =
      vand * (d.right_basis * d.singular_values.asDiagonal()).cast<cd>() * d.eig_right;
  p.linear = inner.diagonal().conjugate();
  p.constant = d.snapshot_energy;
  return p;
}

AmplitudeFit optimal_amplitudes(const DmdDecomposition& d) {
  const AmplitudeProblem p = amplitude_problem(d);
  Eigen::LLT<MatrixXcd> llt(p.gram);
  if (llt.info() == Eigen::Success && llt.rcond() > kSingularRcond) {
    return {llt.solve(p.linear), false};
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(p.gram);
  return {cod.solve(p.linear), true};
}

AmplitudeFit optimal_amplitudes(const DmdDecomposition& d, const SnapshotPair& snap) {
  require(snap.psi0.cols() == d.snapshot_count && snap.psi0.rows() == d.modes.rows(),
          ErrorCode::DimensionMismatch, "snapshot pair does not match the decomposition");
  return optimal_amplitudes(d);
}

double loss(const DmdDecomposition& d, const VectorXcd& alpha) {
  require(alpha.size() == d.rank, ErrorCode::LengthMismatch, "amplitude vector length != rank");
  const MatrixXcd vand = vandermonde(d.eigenvalues, d.snapshot_count);
  const MatrixXcd reduced =
      (d.singular_values.asDiagonal() * d.right_basis.transpose()).cast<cd>();
  const MatrixXcd residual = reduced - d.eig_right * alpha.asDiagonal() * vand;
  return d.residual_outside_basis + residual.squaredNorm();
}

double loss(const DmdDecomposition& d, const SnapshotPair& snap, const VectorXcd& alpha) {
  require(alpha.size() == d.rank, ErrorCode::LengthMismatch, "amplitude vector length != rank");
  require(snap.psi0.cols() == d.snapshot_count && snap.psi0.rows() == d.modes.rows(),
          ErrorCode::DimensionMismatch, "snapshot pair does not match the decomposition");
  const MatrixXcd vand = vandermonde(d.eigenvalues, d.snapshot_count);
  const MatrixXcd model = d.modes * (alpha.asDiagonal() * vand);
  return (snap.psi0.cast<cd>() - model).squaredNorm();
}

ModeMask full_mask(Index rank) { return ModeMask(static_cast<std::size_t>(rank), true); }

MatrixXd reconstruct(const DmdDecomposition& d, const ModeMask& mask, Index n_out) {
  return reconstruct(d, mask, n_out, d.amplitudes);
}

MatrixXd reconstruct(const DmdDecomposition& d, const ModeMask& mask, Index n_out,
                     const VectorXcd& amplitudes) {
  require(n_out >= 1, ErrorCode::InvalidArgument, "n_out must be positive");
  std::vector<double> times(static_cast<std::size_t>(n_out));
  std::iota(times.begin(), times.end(), 0.0);
  return reconstruct_at(d, mask, times, amplitudes);
}

MatrixXd reconstruct_at(const DmdDecomposition& d, const ModeMask& mask,
                        const std::vector<double>& times, const VectorXcd& amplitudes) {
  check_mask(d, mask);
  require(!times.empty(), ErrorCode::InvalidArgument, "need at least one output time");
  require(amplitudes.size() == d.rank, ErrorCode::LengthMismatch,
          "amplitude vector length != rank");
  const std::vector<Index> idx = selected(mask);
  const Index s = static_cast<Index>(idx.size());
  MatrixXcd phi(d.modes.rows(), s);
  VectorXcd mu(s);
  VectorXcd alpha(s);
  for (Index k = 0; k < s; ++k) {
    phi.col(k) = d.modes.col(idx[static_cast<std::size_t>(k)]);
    mu(k) = d.eigenvalues(idx[static_cast<std::size_t>(k)]);
    alpha(k) = amplitudes(idx[static_cast<std::size_t>(k)]);
  }
  const MatrixXcd evo = evolution_at(mu, times);
  return (phi * (alpha.asDiagonal() * evo)).real();
}

}  // namespace modesift::dmd
