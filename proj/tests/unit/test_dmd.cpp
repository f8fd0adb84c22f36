#include "modesift/dmd.hpp"
#include "modesift/error.hpp"
#include "oracles.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <complex>

using namespace modesift;
using cd = std::complex<double>;

namespace {

// Greedy nearest matching; planted sets are well separated.
double eig_match_error(Eigen::VectorXcd got, std::vector<cd> want) {
  REQUIRE(static_cast<std::size_t>(got.size()) == want.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    auto it = std::min_element(want.begin(), want.end(), [&](cd a, cd b) {
      return std::abs(a - got(i)) < std::abs(b - got(i));
    });
    worst = std::max(worst, std::abs(*it - got(i)));
    want.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("planted eigenvalues are recovered") {
  const auto p = synth::planted_system(60, 12, {0.9, cd(0.7, 0.5), cd(0.2, 0.95)}, 11);
  const auto d = dmd::decompose(snapshots_from_stack(p.stack, 30.0));
  CHECK(d.rank == 5);
  CHECK(eig_match_error(d.eigenvalues, p.mu) < 1e-10);
  for (Eigen::Index i = 0; i < d.rank; ++i) CHECK(d.modes.col(i).norm() == doctest::Approx(1.0));
  // Z^* Y = I
  CHECK((d.eig_left_adjoint * d.eig_right - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-10);
}

TEST_CASE("full reconstruction matches noise-free data") {
  const auto p = synth::planted_system(40, 10, {0.95, cd(0.8, 0.4)}, 5);
  const auto d = dmd::decompose(snapshots_from_stack(p.stack, 10.0));
  const Eigen::MatrixXd rec = dmd::reconstruct(d, dmd::full_mask(d.rank), 11);
  CHECK((rec - p.stack).norm() / p.stack.norm() < 1e-9);
}

TEST_CASE("amplitudes agree with a dense least-squares fit") {
  const Eigen::MatrixXd stack = synth::random_matrix(30, 8, 3);
  const SnapshotPair snap = snapshots_from_stack(stack, 1.0);
  const auto d = dmd::decompose(snap);
  const Eigen::VectorXcd ref = oracle::lstsq_amplitudes(d.modes, d.eigenvalues, snap.psi0);
  CHECK((d.amplitudes - ref).norm() / ref.norm() < 1e-8);
  CHECK(dmd::loss(d, d.amplitudes) ==
        doctest::Approx(oracle::direct_loss(d.modes, d.eigenvalues, snap.psi0, d.amplitudes))
            .epsilon(1e-9));
  CHECK(dmd::loss(d, snap, d.amplitudes) == doctest::Approx(dmd::loss(d, d.amplitudes)).epsilon(1e-9));
}

TEST_CASE("amplitude quadratic form reproduces the loss") {
  const Eigen::MatrixXd stack = synth::random_matrix(25, 7, 8);
  const auto d = dmd::decompose(snapshots_from_stack(stack, 1.0));
  const auto prob = dmd::amplitude_problem(d);
  const Eigen::VectorXcd a = synth::random_complex(static_cast<int>(d.rank), 0.5, 9);
  const double j = oracle::l1_objective(prob.gram, prob.linear, prob.constant, a, 0.0);
  CHECK(j == doctest::Approx(dmd::loss(d, a)).epsilon(1e-9));
  CHECK(prob.constant == doctest::Approx(stack.leftCols(6).squaredNorm()));
}

TEST_CASE("rank truncation drops null directions") {
  const auto p = synth::planted_system(50, 15, {cd(0.9, 0.3)}, 21);
  const auto d = dmd::decompose(snapshots_from_stack(p.stack, 1.0));
  CHECK(d.rank == 2);
  CHECK(d.singular_values.size() == 2);
}

TEST_CASE("vandermonde and fractional evolution") {
  Eigen::VectorXcd mu(3);
  mu << cd(0.5, 0.5), cd(-0.9, 0.0), cd(0.0, 0.0);
  const auto v = dmd::vandermonde(mu, 4);
  CHECK(v(0, 3) == std::pow(mu(0), 3));
  CHECK(std::abs(v(1, 2) - 0.81) < 1e-15);
  CHECK(v(2, 0) == cd(1.0, 0.0));
  CHECK(v(2, 1) == cd(0.0, 0.0));

  const auto e = dmd::evolution_at(mu, {0.0, 1.0, 2.0, 0.5});
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e(i, k) - v(i, k)) < 1e-14);
  }
  CHECK(std::abs(e(0, 3) * e(0, 3) - mu(0)) < 1e-14);
  CHECK(e(2, 3) == cd(0.0, 0.0));
}

TEST_CASE("masked reconstruction errors") {
  const auto d = dmd::decompose(snapshots_from_stack(synth::random_matrix(12, 5, 1), 1.0));
  CHECK_THROWS_AS(dmd::reconstruct(d, dmd::ModeMask(static_cast<std::size_t>(d.rank), false), 3),
                  Error);
  CHECK_THROWS_AS(dmd::reconstruct(d, dmd::ModeMask(1, true), 3), Error);
  CHECK_THROWS_AS(dmd::decompose(snapshots_from_stack(Eigen::MatrixXd::Zero(12, 5), 1.0)), Error);
}
