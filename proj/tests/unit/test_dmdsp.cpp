#include "modesift/dmdsp.hpp"
#include "modesift/error.hpp"
#include "oracles.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <complex>

using namespace modesift;
using cd = std::complex<double>;

namespace {

dmd::DmdDecomposition planted(double noise = 1e-3) {
  const auto p = synth::planted_system(80, 16, {0.97, cd(0.9, 0.3), cd(0.6, 0.7)}, 4, noise, 2.0);
  return dmd::decompose(snapshots_from_stack(p.stack, 100.0));
}

}  // namespace

TEST_CASE("log grid") {
  const auto g = dmdsp::default_gamma_grid();
  REQUIRE(g.size() == 400);
  CHECK(g.front() == 38.0);
  CHECK(g.back() == 20000.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g[1] / g[0] == doctest::Approx(g[399] / g[398]));
  CHECK(dmdsp::log_grid(2.0, 8.0, 3)[1] == doctest::Approx(4.0));
}

TEST_CASE("zero structure from a relative threshold") {
  Eigen::VectorXcd a(4);
  a << cd(1.0, 0.0), cd(0.0, 1e-7), cd(1e-6, 0.0), cd(0.0, 2e-6);
  const auto s = dmdsp::extract_structure(a, 1e-6);
  CHECK(s == dmdsp::SparsityStructure{false, true, true, false});
  CHECK_THROWS_AS(dmdsp::extract_structure(Eigen::VectorXcd::Zero(3)), Error);
}

TEST_CASE("polish satisfies the constrained optimality conditions") {
  const Eigen::MatrixXcd p = synth::random_hpd(6, 0.5, 4.0, 2);
  const Eigen::VectorXcd q = synth::random_complex(6, 1.0, 3);
  const dmd::AmplitudeProblem prob{p, q, 10.0};
  const dmdsp::SparsityStructure s{false, true, false, true, true, false};
  const auto r = dmdsp::polish(prob, s);
  CHECK_FALSE(r.used_fallback);
  const Eigen::VectorXcd grad = p * r.alpha - q;
  for (int i = 0; i < 6; ++i) {
    if (s[static_cast<std::size_t>(i)]) {
      CHECK(r.alpha(i) == cd(0.0, 0.0));
    } else {
      CHECK(std::abs(grad(i)) < 1e-10);
    }
  }
}

TEST_CASE("admm matches proximal gradient on a random problem") {
  const Eigen::MatrixXcd p = synth::random_hpd(8, 0.2, 5.0, 12);
  const Eigen::VectorXcd q = synth::random_complex(8, 2.0, 13);
  const double gamma = 0.8;
  dmdsp::AdmmParams tight;
  tight.eps_abs = 1e-12;
  tight.eps_rel = 1e-12;
  tight.max_iter = 200000;
  const dmdsp::AdmmSolver solver({p, q, 0.0}, tight);
  const auto r = solver.solve(gamma);
  CHECK(r.converged);
  const auto ref = oracle::proximal_gradient(p, q, gamma, 1e-13);
  CHECK((r.alpha - ref.alpha).norm() < 1e-7);
  CHECK(dmdsp::l1_objective({p, q, 0.0}, r.alpha, gamma) ==
        doctest::Approx(oracle::l1_objective(p, q, 0.0, r.alpha, gamma)).epsilon(1e-12));
}

TEST_CASE("tiny penalty recovers the unregularized amplitudes") {
  const auto d = planted();
  const auto r = dmdsp::admm_solve(d, 1e-9);
  CHECK(r.converged);
  CHECK((r.alpha - d.amplitudes).norm() / d.amplitudes.norm() < 1e-4);
}

TEST_CASE("serial and parallel sweeps are identical") {
  const auto d = planted();
  const auto grid = dmdsp::log_grid(0.01, 500.0, 24);
  const auto a = dmdsp::gamma_sweep(d, grid);
  const auto b = dmdsp::serial::gamma_sweep(d, grid);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].gamma == b[i].gamma);
    CHECK(a[i].nnz == b[i].nnz);
    CHECK(a[i].structure == b[i].structure);
    CHECK(a[i].alpha_polished == b[i].alpha_polished);
    CHECK(a[i].loss == b[i].loss);
  }
}

TEST_CASE("gamma scale is a pure reparametrization") {
  const auto d = planted();
  const std::vector<double> nominal{10.0, 200.0, 3000.0};
  std::vector<double> scaled;
  for (double g : nominal) scaled.push_back(g / 255.0);
  dmdsp::SweepOptions opt;
  opt.gamma_scale = dmdsp::kEightBitGammaScale;
  const auto a = dmdsp::gamma_sweep(d, nominal, opt);
  const auto b = dmdsp::gamma_sweep(d, scaled);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].gamma == nominal[i]);
    CHECK(a[i].nnz == b[i].nnz);
    CHECK((a[i].alpha_admm - b[i].alpha_admm).norm() <= 1e-12 * (1.0 + b[i].alpha_admm.norm()));
  }
}

TEST_CASE("sweep bookkeeping") {
  const auto d = planted();
  const auto recs = dmdsp::gamma_sweep(d, dmdsp::log_grid(0.01, 1e4, 30));
  for (const auto& r : recs) {
    if (r.error) continue;
    CHECK(r.nnz == static_cast<int>(std::count(r.structure.begin(), r.structure.end(), false)));
    CHECK(r.percent_preserved == doctest::Approx(100.0 * r.nnz / static_cast<double>(d.rank)));
    CHECK(r.loss >= dmd::loss(d, d.amplitudes) - 1e-9);
    CHECK(r.performance_loss_pct >= -1e-9);
    const auto mask = r.retained_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) CHECK(mask[i] == !r.structure[i]);
  }
}

TEST_CASE("select_percentage prefers distance, then loss, then gamma") {
  auto rec = [](double g, double pct, double loss) {
    dmdsp::SparsityRecord r;
    r.gamma = g;
    r.percent_preserved = pct;
    r.loss = loss;
    return r;
  };
  const std::vector<dmdsp::SparsityRecord> recs{rec(1, 80, 1.0), rec(2, 50, 3.0), rec(3, 40, 2.0),
                                                rec(4, 40, 2.0), rec(5, 10, 9.0)};
  CHECK(dmdsp::select_percentage(recs, 78).gamma == 1);
  CHECK(dmdsp::select_percentage(recs, 45).gamma == 3);
  CHECK(dmdsp::select_percentage(recs, 41).gamma == 3);
  CHECK(dmdsp::select_percentage(recs, 5).gamma == 5);
  CHECK_THROWS_AS(dmdsp::select_percentage(recs, 0), Error);
}
