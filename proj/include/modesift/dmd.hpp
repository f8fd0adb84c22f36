#pragma once

#include "modesift/seqio.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace modesift::dmd {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Boolean selector over modes. true = mode is used.
using ModeMask = std::vector<bool>;

// Exact DMD of one snapshot pair.
//
// With the economy SVD Psi0 = U Sigma V^* truncated to rank r, the projected
// operator is F = U^* Psi1 V Sigma^{-1} = Y diag(mu) Z^*, Z^* Y = I, and the
// modes are Phi = U Y. Modes are ordered by descending |alpha| (ties by
// descending |mu|) once amplitudes are fitted.
struct DmdDecomposition {
  MatrixXcd modes;            // Phi, M x r, unit-norm columns
  VectorXcd eigenvalues;      // mu, length r
  VectorXd singular_values;   // Sigma, nonincreasing
  MatrixXd left_basis;        // U, M x r
  MatrixXd right_basis;       // V, N x r
  MatrixXcd eig_right;        // Y, r x r, unit-norm columns
  MatrixXcd eig_left_adjoint; // Z^*, r x r, rows z_i^*
  MatrixXcd reduced_operator; // F, r x r
  VectorXcd amplitudes;       // alpha
  Index rank = 0;
  Index snapshot_count = 0;   // N
  double fps = 1.0;

  // ||Psi0||_F^2 and ||Psi0 - U Sigma V^*||_F^2, kept so the amplitude loss
  // can be evaluated without touching the M x N data again.
  double snapshot_energy = 0.0;
  double residual_outside_basis = 0.0;

  // Set when the amplitude normal equations were singular and the minimum-norm
  // least-squares solution was used instead.
  bool amplitude_fallback = false;
};

// Hermitian quadratic form of the amplitude loss:
//   J(alpha) = alpha^* P alpha - 2 Re(q^* alpha) + constant
// with P = (Y^*Y) o conj(Vand Vand^*) and q = conj(diag(Vand V Sigma Y)).
struct AmplitudeProblem {
  MatrixXcd gram;      // P
  VectorXcd linear;    // q
  double constant = 0; // J(0) = ||Psi0||_F^2
};

struct AmplitudeFit {
  VectorXcd alpha;
  bool used_fallback = false;
};

inline constexpr double kDefaultRankTol = 1e-10;

// Vandermonde matrix with entry (i, k) = mu_i^k for k = 0..columns-1.
MatrixXcd vandermonde(const VectorXcd& eigenvalues, Index columns);

// Evolution matrix at arbitrary (real) times: entry (i, j) = exp(t_j log mu_i),
// principal branch, with 0^0 = 1 and 0^t = 0 for t > 0.
MatrixXcd evolution_at(const VectorXcd& eigenvalues, const std::vector<double>& times);

DmdDecomposition decompose(const SnapshotPair& snap, double rank_tol = kDefaultRankTol);

AmplitudeProblem amplitude_problem(const DmdDecomposition& d);

// Optimal amplitudes of the unregularized loss for the decomposition's
// current mode order. Falls back to minimum-norm least squares when the
// Hermitian system is numerically singular.
AmplitudeFit optimal_amplitudes(const DmdDecomposition& d);
AmplitudeFit optimal_amplitudes(const DmdDecomposition& d, const SnapshotPair& snap);

// ||Psi0 - Phi diag(alpha) Vand||_F^2, evaluated in the reduced basis.
double loss(const DmdDecomposition& d, const VectorXcd& alpha);

// Same quantity evaluated directly against the snapshot data.
double loss(const DmdDecomposition& d, const SnapshotPair& snap, const VectorXcd& alpha);

// Real part of Phi_s diag(alpha_s) Vand_s with Vand_s covering powers
// 0..n_out-1. `amplitudes` defaults to the decomposition's own.
MatrixXd reconstruct(const DmdDecomposition& d, const ModeMask& mask, Index n_out);
MatrixXd reconstruct(const DmdDecomposition& d, const ModeMask& mask, Index n_out,
                     const VectorXcd& amplitudes);

// Reconstruction at arbitrary real-valued time steps (in frames from psi_0).
MatrixXd reconstruct_at(const DmdDecomposition& d, const ModeMask& mask,
                        const std::vector<double>& times, const VectorXcd& amplitudes);

ModeMask full_mask(Index rank);

}  // namespace modesift::dmd
