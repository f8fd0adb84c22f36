#include "modesift/analysis.hpp"
#include "modesift/error.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace modesift;
using namespace modesift::analysis;

namespace {

double abs_sum(const Eigen::VectorXcd& a) { return a.cwiseAbs().sum(); }

}  // namespace

TEST_CASE("oscillation frequency is read off the eigenvalues") {
  const auto d = dmd::decompose(synth::oscillation(64, 30, 200.0, 15.0, 1));
  const auto s = mode_frequencies(d);
  REQUIRE(s.frequency_hz.size() == 2);
  for (double f : s.frequency_hz) CHECK(f == doctest::Approx(15.0).epsilon(1e-9));
  for (double g : s.growth_rate) CHECK(std::abs(g) < 1e-6);
}

TEST_CASE("histogram binning") {
  const auto h = SpectralHistogram::empty(200.0, 1.0);
  CHECK(h.energy.size() == 100);
  CHECK(h.bin_edges.front() == 0.0);
  CHECK(h.bin_edges.back() == 100.0);
  CHECK(h.bin_of(0.0) == 0);
  CHECK(h.bin_of(14.999) == 14);
  CHECK(h.bin_of(15.0) == 15);
  CHECK(h.bin_of(100.0) == 99);

  const auto odd = SpectralHistogram::empty(25.0, 5.0);
  CHECK(odd.energy.size() == 3);
  CHECK(odd.bin_edges.back() == 12.5);
}

TEST_CASE("merge is exact and associative") {
  std::vector<dmd::DmdDecomposition> ds;
  for (int i = 0; i < 3; ++i) {
    ds.push_back(dmd::decompose(synth::oscillation(40, 20, 100.0, 5.0 + 11.0 * i, 10 + i)));
  }
  auto part = [&](int i) {
    auto h = SpectralHistogram::empty(100.0, 2.0);
    h.add(ds[static_cast<std::size_t>(i)]);
    return h;
  };
  auto left = part(0);
  left.merge(part(1));
  left.merge(part(2));
  auto right = part(1);
  right.merge(part(2));
  auto right_all = part(0);
  right_all.merge(right);
  const auto whole = spectral_histogram(ds, 2.0);
  CHECK(left.energy == right_all.energy);
  CHECK(whole.energy == left.energy);
  CHECK(whole.n_sequences == 3);
  double expect = 0.0;
  for (const auto& d : ds) expect += abs_sum(d.amplitudes);
  CHECK(whole.total() == doctest::Approx(expect));
  CHECK(whole.energy[whole.bin_of(5.0)] > 0.0);
}

TEST_CASE("mixed frame rates are rejected") {
  std::vector<dmd::DmdDecomposition> ds{dmd::decompose(synth::oscillation(20, 8, 100.0, 5.0, 1)),
                                        dmd::decompose(synth::oscillation(20, 8, 50.0, 5.0, 1))};
  CHECK_THROWS_AS(spectral_histogram(ds), Error);
  auto a = SpectralHistogram::empty(100.0, 1.0);
  CHECK_THROWS_AS(a.merge(SpectralHistogram::empty(50.0, 1.0)), Error);
}

TEST_CASE("profiles conserve amplitude mass") {
  Eigen::VectorXcd a(5);
  a << 1.0, std::complex<double>(0.0, -2.0), 0.5, 3.0, 0.25;
  const dmdsp::SparsityStructure s{false, true, false, true, false};
  const auto masked = temporal_profile(a, 9, ProfileMapping::SparseMask, s);
  CHECK(masked.frame_index.front() == 1);
  CHECK(masked.frame_index.back() == 9);
  CHECK(masked.magnitude == std::vector<double>{1.0, 0.0, 0.5, 0.0, 0.25, 0, 0, 0, 0});

  const auto grid = temporal_profile(a, 9, ProfileMapping::UniformGrid);
  double sum = 0.0;
  for (double m : grid.magnitude) sum += m;
  CHECK(sum == doctest::Approx(abs_sum(a)));
  CHECK(grid.magnitude[0] == 1.0);

  CHECK_THROWS_AS(temporal_profile(a, 9, ProfileMapping::SparseMask), Error);
  CHECK_THROWS_AS(temporal_profile(a, 3, ProfileMapping::SparseMask, s), Error);
}

TEST_CASE("gamma curve flags increases") {
  std::vector<dmdsp::SparsityRecord> recs(4);
  const double pct[] = {100, 60, 80, 20};
  for (std::size_t i = 0; i < 4; ++i) {
    recs[i].gamma = static_cast<double>(i + 1);
    recs[i].percent_preserved = pct[i];
  }
  const auto c = gamma_percentage_curve(recs);
  CHECK_FALSE(c.monotone());
  CHECK(c.violations == std::vector<std::size_t>{2});
  std::swap(recs[0], recs[1]);
  CHECK_THROWS_AS(gamma_percentage_curve(recs), Error);
}

TEST_CASE("csv writers") {
  const auto d = dmd::decompose(synth::oscillation(30, 10, 50.0, 5.0, 2));
  std::ostringstream spec;
  write_spectrum_csv(spec, spectral_histogram({d}, 5.0));
  const std::string s = spec.str();
  CHECK(s.rfind("# energy is the unweighted sum of |alpha| over 1 sequence(s); fps 50\n", 0) == 0);
  CHECK(s.find("bin_lo_hz,bin_hi_hz,energy\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 5);

  std::ostringstream prof;
  Eigen::VectorXcd a(2);
  a << 0.1, 0.2;
  write_profile_csv(prof, temporal_profile(a, 2, ProfileMapping::UniformGrid));
  CHECK(prof.str() == "frame_index,magnitude\n1,0.30000000000000004\n2,0\n");
}
