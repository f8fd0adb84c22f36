#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical kernels.

#include "modesift/features.hpp"
#include "modesift/seqio.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace oracle {

// Amplitudes minimizing ||psi0 - Phi diag(alpha) Vand||_F by stacking the
// problem into one dense complex least-squares system.
Eigen::VectorXcd lstsq_amplitudes(const Eigen::MatrixXcd& modes, const Eigen::VectorXcd& mu,
                                  const Eigen::MatrixXd& psi0);

// Same residual, evaluated densely.
double direct_loss(const Eigen::MatrixXcd& modes, const Eigen::VectorXcd& mu,
                   const Eigen::MatrixXd& psi0, const Eigen::VectorXcd& alpha);

// a^* P a - 2 Re(q^* a) + c + gamma |a|_1
double l1_objective(const Eigen::MatrixXcd& p, const Eigen::VectorXcd& q, double c,
                    const Eigen::VectorXcd& a, double gamma);

struct ProxResult {
  Eigen::VectorXcd alpha;
  int iterations = 0;
  double step_change = 0.0;
};

// Accelerated proximal gradient (FISTA with adaptive restart) on the same
// objective; stops when successive iterates move less than `tol`.
ProxResult proximal_gradient(const Eigen::MatrixXcd& p, const Eigen::VectorXcd& q, double gamma,
                             double tol = 1e-9, int max_iter = 2000000);

// Brute-force LBPTOP: explicit neighbor coordinates with bounds checks,
// transition counting per code, and a freshly enumerated uniform ranking.
std::vector<double> lbptop_bruteforce(const modesift::FrameSequence& seq,
                                      const modesift::features::LbptopConfig& cfg);

// Number of P-bit codes with at most two circular 0/1 transitions, counted
// by writing each code out as a bit string.
int count_uniform_codes(int p);

// Path graph Laplacian on n vertices.
Eigen::MatrixXd path_laplacian(int n);

struct ConfusionHand {
  double rr, pr, f1;
};
ConfusionHand hand_metrics(int tp, int fp, int fn);

}  // namespace oracle
