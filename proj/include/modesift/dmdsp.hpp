#pragma once

#include "modesift/dmd.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace modesift::dmdsp {

using dmd::AmplitudeProblem;
using dmd::DmdDecomposition;
using Eigen::VectorXcd;

// true = amplitude constrained to zero (one column of E).
using SparsityStructure = std::vector<bool>;

struct AdmmParams {
  double rho = 1.0;
  int max_iter = 10000;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
};

struct AdmmResult {
  VectorXcd alpha;  // sparse iterate (exact zeros where thresholded)
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

inline constexpr double kDefaultZeroTol = 1e-6;
inline constexpr double kDefaultGammaMin = 38.0;
inline constexpr double kDefaultGammaMax = 20000.0;
inline constexpr int kDefaultGammaCount = 400;

// ADMM for  min_alpha J(alpha) + gamma * sum_i |alpha_i|.
//
// The alpha-update system (P + rho/2 I) is factored once, so a solver can be
// shared by concurrent solves at different gamma values.
class AdmmSolver {
 public:
  AdmmSolver(AmplitudeProblem problem, AdmmParams params = {});

  AdmmResult solve(double gamma) const;

  const AmplitudeProblem& problem() const noexcept { return problem_; }
  const AdmmParams& params() const noexcept { return params_; }

 private:
  AmplitudeProblem problem_;
  AdmmParams params_;
  Eigen::MatrixXcd inverse_;  // (P + rho/2 I)^{-1}
  VectorXcd inverse_q_;       // (P + rho/2 I)^{-1} q
};

AdmmResult admm_solve(const DmdDecomposition& d, double gamma, const AdmmParams& params = {});

// Value of J(alpha) + gamma * ||alpha||_1 up to the data constant.
double l1_objective(const AmplitudeProblem& p, const VectorXcd& alpha, double gamma);

// Entry i is true iff |alpha_i| <= zero_tol * max_j |alpha_j|. Throws AllZero
// when every entry is at or below the threshold.
SparsityStructure extract_structure(const VectorXcd& alpha, double zero_tol = kDefaultZeroTol);

struct PolishResult {
  VectorXcd alpha;
  bool used_fallback = false;  // bordered system was singular; reduced solve used
};

// Equality-constrained least squares: min J(alpha) s.t. E^T alpha = 0, solved
// through the bordered system [P E; E^T 0]. Constrained entries are exactly 0.
PolishResult polish(const AmplitudeProblem& p, const SparsityStructure& structure);
PolishResult polish(const DmdDecomposition& d, const SparsityStructure& structure);

struct SparsityRecord {
  double gamma = 0.0;
  VectorXcd alpha_admm;
  SparsityStructure structure;
  VectorXcd alpha_polished;
  double loss = 0.0;
  int nnz = 0;
  double percent_preserved = 0.0;
  double performance_loss_pct = 0.0;

  bool admm_converged = true;
  int admm_iterations = 0;
  bool polish_fallback = false;
  std::optional<std::string> error;  // per-gamma failure (e.g. AllZero)

  dmd::ModeMask retained_mask() const;
};

// 400 log-spaced values in [38, 20000] by default; endpoints are exact.
std::vector<double> log_grid(double lo, double hi, int count);
inline std::vector<double> default_gamma_grid() {
  return log_grid(kDefaultGammaMin, kDefaultGammaMax, kDefaultGammaCount);
}

// Penalty scale for gamma values quoted in 8-bit intensity units (0..255)
// when the data are [0,1] intensities. Scaling data by s and gamma by s
// leaves the minimizer unchanged, so gamma_8bit / 255 is the same penalty.
inline constexpr double kEightBitGammaScale = 1.0 / 255.0;

struct SweepOptions {
  AdmmParams admm;
  double zero_tol = kDefaultZeroTol;
  // The ADMM penalty is gamma * gamma_scale; records keep the nominal gamma.
  double gamma_scale = 1.0;
};

// One record per gamma (ADMM -> structure -> polish -> loss). Gamma values
// are solved independently across OpenMP threads.
std::vector<SparsityRecord> gamma_sweep(const DmdDecomposition& d, const std::vector<double>& grid,
                                        const SweepOptions& options = {});

// Record nearest to p_target percent; ties by smaller loss, then smaller gamma.
const SparsityRecord& select_percentage(const std::vector<SparsityRecord>& records,
                                        double p_target);

// Builds a single record for one gamma; used by both sweep variants.
SparsityRecord evaluate_gamma(const DmdDecomposition& d, const AdmmSolver& solver, double gamma,
                              double zero_tol, double gamma_scale = 1.0);

namespace serial {
// Reference sweep: same per-gamma computation, one gamma at a time.
std::vector<SparsityRecord> gamma_sweep(const DmdDecomposition& d, const std::vector<double>& grid,
                                        const SweepOptions& options = {});
}  // namespace serial

}  // namespace modesift::dmdsp
