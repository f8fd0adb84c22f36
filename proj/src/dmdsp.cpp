#include "modesift/dmdsp.hpp"

#include "modesift/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

namespace modesift::dmdsp {

namespace {

using cd = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;

constexpr double kSingularRcond = 64.0 * std::numeric_limits<double>::epsilon();

VectorXcd soft_threshold(const VectorXcd& v, double kappa) {
  VectorXcd out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    out(i) = mag > kappa ? (1.0 - kappa / mag) * v(i) : cd{0.0, 0.0};
  }
  return out;
}

std::vector<Index> free_indices(const SparsityStructure& s) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i]) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

PolishResult reduced_solve(const AmplitudeProblem& p, const SparsityStructure& structure) {
  const std::vector<Index> idx = free_indices(structure);
  const Index k = static_cast<Index>(idx.size());
  MatrixXcd pr(k, k);
  VectorXcd qr(k);
  for (Index a = 0; a < k; ++a) {
    qr(a) = p.linear(idx[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < k; ++b) {
      pr(a, b) = p.gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(pr);
  const VectorXcd sol = cod.solve(qr);
  PolishResult out{VectorXcd::Zero(p.linear.size()), true};
  for (Index a = 0; a < k; ++a) out.alpha(idx[static_cast<std::size_t>(a)]) = sol(a);
  return out;
}

}  // namespace

AdmmSolver::AdmmSolver(AmplitudeProblem problem, AdmmParams params)
    : problem_(std::move(problem)), params_(params) {
  require(params_.rho > 0.0, ErrorCode::InvalidArgument, "ADMM penalty rho must be positive");
  require(params_.max_iter > 0, ErrorCode::InvalidArgument, "ADMM max_iter must be positive");
  const Index n = problem_.gram.rows();
  const Eigen::LLT<MatrixXcd> factor(problem_.gram + (params_.rho / 2.0) * MatrixXcd::Identity(n, n));
  require(factor.info() == Eigen::Success, ErrorCode::InvalidArgument,
          "amplitude Gram matrix is not positive semidefinite");
  // The shift keeps the system well conditioned, so one explicit inverse
  // turns every x-update into a single matrix-vector product.
  inverse_ = factor.solve(MatrixXcd::Identity(n, n));
  inverse_q_ = inverse_ * problem_.linear;
}

AdmmResult AdmmSolver::solve(double gamma) const {
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorCode::InvalidArgument,
          "gamma must be finite and non-negative");
  const Index n = problem_.linear.size();
  const double rho = params_.rho;
  const double kappa = gamma / rho;
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  VectorXcd z = VectorXcd::Zero(n);  // sparse copy
  VectorXcd y = VectorXcd::Zero(n);  // scaled multiplier (unscaled form: lambda)
  AdmmResult res;
  res.alpha = z;
  for (int it = 1; it <= params_.max_iter; ++it) {
    const VectorXcd x = inverse_q_ + inverse_ * ((rho / 2.0) * z - 0.5 * y);
    const VectorXcd v = x + y / rho;
    const VectorXcd z_new = soft_threshold(v, kappa);

    res.primal_residual = (x - z_new).norm();
    res.dual_residual = rho * (z_new - z).norm();
    y += rho * (x - z_new);
    z = z_new;
    res.iterations = it;

    const double eps_primal = sqrt_n * params_.eps_abs + params_.eps_rel * std::max(x.norm(), z.norm());
    const double eps_dual = sqrt_n * params_.eps_abs + params_.eps_rel * y.norm();
    if (res.primal_residual < eps_primal && res.dual_residual < eps_dual) {
      res.converged = true;
      break;
    }
  }
  res.alpha = z;
  return res;
}

AdmmResult admm_solve(const DmdDecomposition& d, double gamma, const AdmmParams& params) {
  return AdmmSolver(dmd::amplitude_problem(d), params).solve(gamma);
}

double l1_objective(const AmplitudeProblem& p, const VectorXcd& alpha, double gamma) {
  const double quad = std::real(alpha.dot(p.gram * alpha));
  const double lin = std::real(p.linear.dot(alpha));
  return quad - 2.0 * lin + p.constant + gamma * alpha.cwiseAbs().sum();
}

SparsityStructure extract_structure(const VectorXcd& alpha, double zero_tol) {
  require(zero_tol >= 0.0, ErrorCode::InvalidArgument, "zero_tol must be non-negative");
  const double peak = alpha.size() > 0 ? alpha.cwiseAbs().maxCoeff() : 0.0;
  SparsityStructure s(static_cast<std::size_t>(alpha.size()));
  bool all_zero = true;
  for (Index i = 0; i < alpha.size(); ++i) {
    s[static_cast<std::size_t>(i)] = std::abs(alpha(i)) <= zero_tol * peak;
    all_zero = all_zero && s[static_cast<std::size_t>(i)];
  }
  require(!all_zero, ErrorCode::AllZero, "every amplitude is below the zero tolerance");
  return s;
}

PolishResult polish(const AmplitudeProblem& p, const SparsityStructure& structure) {
  const Index r = p.linear.size();
  require(static_cast<Index>(structure.size()) == r, ErrorCode::LengthMismatch,
          "structure length != rank");
  const Index m = std::count(structure.begin(), structure.end(), true);
  require(m < r, ErrorCode::AllZero, "structure constrains every amplitude");

  // [P E; E^T 0] [alpha; nu] = [q; 0]
  MatrixXcd kkt = MatrixXcd::Zero(r + m, r + m);
  kkt.topLeftCorner(r, r) = p.gram;
  Index col = 0;
  for (Index i = 0; i < r; ++i) {
    if (!structure[static_cast<std::size_t>(i)]) continue;
    kkt(i, r + col) = 1.0;
    kkt(r + col, i) = 1.0;
    ++col;
  }
  VectorXcd rhs = VectorXcd::Zero(r + m);
  rhs.head(r) = p.linear;

  Eigen::PartialPivLU<MatrixXcd> lu(kkt);
  if (!(lu.rcond() > kSingularRcond)) return reduced_solve(p, structure);
  const VectorXcd sol = lu.solve(rhs);
  if (!sol.allFinite()) return reduced_solve(p, structure);

  PolishResult out{sol.head(r), false};
  for (Index i = 0; i < r; ++i) {
    if (structure[static_cast<std::size_t>(i)]) out.alpha(i) = 0.0;
  }
  return out;
}

PolishResult polish(const DmdDecomposition& d, const SparsityStructure& structure) {
  return polish(dmd::amplitude_problem(d), structure);
}

dmd::ModeMask SparsityRecord::retained_mask() const {
  dmd::ModeMask mask(structure.size());
  for (std::size_t i = 0; i < structure.size(); ++i) mask[i] = !structure[i];
  return mask;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorCode::InvalidArgument,
          "log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

SparsityRecord evaluate_gamma(const DmdDecomposition& d, const AdmmSolver& solver, double gamma,
                              double zero_tol, double gamma_scale) {
  require(gamma_scale > 0.0 && std::isfinite(gamma_scale), ErrorCode::InvalidArgument,
          "gamma scale must be positive");
  SparsityRecord rec;
  rec.gamma = gamma;
  const AdmmResult admm = solver.solve(gamma * gamma_scale);
  rec.alpha_admm = admm.alpha;
  rec.admm_converged = admm.converged;
  rec.admm_iterations = admm.iterations;
  if (!admm.converged) rec.error = "NoConvergence";

  const Index r = d.rank;
  try {
    rec.structure = extract_structure(admm.alpha, zero_tol);
    const PolishResult pol = polish(solver.problem(), rec.structure);
    rec.alpha_polished = pol.alpha;
    rec.polish_fallback = pol.used_fallback;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllZero) throw;
    rec.structure.assign(static_cast<std::size_t>(r), true);
    rec.alpha_polished = VectorXcd::Zero(r);
    rec.error = "AllZero";
  }
  rec.nnz = static_cast<int>(std::count(rec.structure.begin(), rec.structure.end(), false));
  rec.loss = dmd::loss(d, rec.alpha_polished);
  rec.percent_preserved = 100.0 * rec.nnz / static_cast<double>(r);
  rec.performance_loss_pct =
      d.snapshot_energy > 0.0 ? 100.0 * std::sqrt(rec.loss / d.snapshot_energy) : 0.0;
  return rec;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "gamma grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0 && std::isfinite(grid[i]), ErrorCode::InvalidArgument,
            "gamma values must be finite and non-negative");
    if (i > 0) {
      require(grid[i] > grid[i - 1], ErrorCode::InvalidArgument,
              "gamma grid must be strictly increasing");
    }
  }
}

}  // namespace

std::vector<SparsityRecord> gamma_sweep(const DmdDecomposition& d, const std::vector<double>& grid,
                                        const SweepOptions& options) {
  check_grid(grid);
  const AdmmSolver solver(dmd::amplitude_problem(d), options.admm);
  std::vector<SparsityRecord> records(grid.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
    try {
      records[static_cast<std::size_t>(i)] =
          evaluate_gamma(d, solver, grid[static_cast<std::size_t>(i)], options.zero_tol,
                         options.gamma_scale);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<SparsityRecord> serial::gamma_sweep(const DmdDecomposition& d,
                                                const std::vector<double>& grid,
                                                const SweepOptions& options) {
  check_grid(grid);
  const AdmmSolver solver(dmd::amplitude_problem(d), options.admm);
  std::vector<SparsityRecord> records;
  records.reserve(grid.size());
  for (double g : grid) records.push_back(evaluate_gamma(d, solver, g, options.zero_tol, options.gamma_scale));
  return records;
}

const SparsityRecord& select_percentage(const std::vector<SparsityRecord>& records,
                                        double p_target) {
  require(!records.empty(), ErrorCode::InvalidArgument, "no sparsity records to select from");
  require(p_target > 0.0 && p_target <= 100.0, ErrorCode::InvalidArgument,
          "target percentage must lie in (0, 100]");
  const SparsityRecord* best = &records.front();
  for (const auto& rec : records) {
    const double da = std::abs(rec.percent_preserved - p_target);
    const double db = std::abs(best->percent_preserved - p_target);
    if (da < db || (da == db && (rec.loss < best->loss ||
                                 (rec.loss == best->loss && rec.gamma < best->gamma)))) {
      best = &rec;
    }
  }
  return *best;
}

}  // namespace modesift::dmdsp
