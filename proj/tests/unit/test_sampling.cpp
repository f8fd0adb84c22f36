#include "modesift/error.hpp"
#include "modesift/sampling.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace modesift;
using namespace modesift::sampling;

TEST_CASE("splitmix64 reference stream") {
  SplitMix64 r(0);
  CHECK(r.next() == 0xe220a8397b1dcdafULL);
  CHECK(r.next() == 0x6e789e6aa1b965f4ULL);
  SplitMix64 b(42);
  for (int i = 0; i < 1000; ++i) CHECK(b.below(7) < 7);
}

TEST_CASE("target length rounds half away from zero") {
  CHECK(target_length(100, 45) == 45);
  CHECK(target_length(11, 50) == 6);
  CHECK(target_length(72, 45) == 32);
  CHECK(target_length(3, 10) == 0);
}

TEST_CASE("strategy names") {
  for (auto s : {Strategy::Sparse, Strategy::Uniform, Strategy::UniformFixed, Strategy::Random,
                 Strategy::Baseline}) {
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(strategy_from_string("xx"), Error);
}

TEST_CASE("random indices are sorted, distinct and seeded") {
  const auto a = random_indices(50, 20, 9);
  const auto b = random_indices(50, 20, 9);
  const auto c = random_indices(50, 20, 10);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 20);
  CHECK(a.back() < 50);
  CHECK(random_indices(5, 5, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("random sample keeps the drawn frames") {
  const FrameSequence s = synth::ramp_video(5, 5, 30);
  const auto r = random_sample(s, 40, 3);
  CHECK(r.sequence.frame_count() == 12);
  CHECK(r.kept_indices == random_indices(30, 12, 3));
  CHECK(r.sequence.fps() == doctest::Approx(s.fps() * 12 / 30));
  for (std::size_t j = 0; j < 12; ++j) CHECK(r.sequence.at(j, 2, 3) == s.at(r.kept_indices[j], 2, 3));
  CHECK_THROWS_AS(random_sample(s, 3, 1), Error);
}

TEST_CASE("uniform and fixed length sampling") {
  const FrameSequence s = synth::ramp_video(6, 6, 40);
  const auto u = uniform_sample(s, 25);
  CHECK(u.strategy == Strategy::Uniform);
  CHECK(u.sequence.frame_count() == 10);
  const auto f = fixed_length_sample(s, 150);
  CHECK(f.strategy == Strategy::UniformFixed);
  CHECK(f.sequence.frame_count() == 150);
  CHECK_THROWS_AS(uniform_sample(s, 0), Error);
  CHECK_THROWS_AS(uniform_sample(s, 120), Error);
}

TEST_CASE("baseline is the identity") {
  const FrameSequence s = synth::ramp_video(4, 4, 9);
  CHECK(baseline(s).sequence == s);
  SamplingConfig c;
  CHECK(apply(s, c).sequence == s);
}

TEST_CASE("sparse sampling at full preservation reproduces the input") {
  const FrameSequence s = synth::oscillating_sequence(10, 10, 16, 100.0, 12.0, 5);
  const auto r = sparse_sample(s, 100, dmdsp::default_gamma_grid());
  CHECK(r.sequence.frame_count() == static_cast<std::size_t>(*r.rank));
  CHECK(*r.percent_preserved == 100.0);
  CHECK_FALSE(r.gamma.has_value());
  // Frame j sits at time j * N / nnz; compare where that lands on a source frame.
  const std::size_t n = r.sequence.frame_count();
  for (std::size_t j = 0; j < n; ++j) {
    if ((j * 15) % n != 0) continue;
    CHECK(r.sequence.at(j, 4, 5) == doctest::Approx(s.at(j * 15 / n, 4, 5)).epsilon(1e-8));
  }
}

TEST_CASE("sparse sampling shortens toward the target") {
  const auto corpus = synth::face_corpus({1, 1, 32, 28, 40, 200.0, 0.6, 0.8, 0.01, 3});
  const FrameSequence& s = corpus[0].sequence;
  const auto r = sparse_sample(s, 45, dmdsp::default_gamma_grid());
  REQUIRE(r.gamma.has_value());
  CHECK(r.sequence.frame_count() == static_cast<std::size_t>(*r.nnz));
  CHECK(r.sequence.frame_count() < s.frame_count());
  CHECK(r.sequence.fps() == doctest::Approx(s.fps() * *r.nnz / 40.0));

  const auto k = sparse_sample(s, 45, dmdsp::default_gamma_grid(), sequence_sweep_options(), true);
  CHECK(k.kept_indices.size() == static_cast<std::size_t>(*k.nnz));
  CHECK(k.sequence.at(0, 3, 3) == s.at(k.kept_indices[0], 3, 3));
}

TEST_CASE("sparse sampling reports sequences that collapse to one mode") {
  const auto corpus = synth::face_corpus({1, 1, 32, 28, 40, 200.0, 0.6, 0.8, 0.01, 3});
  // Unscaled penalties are 255x too strong for [0,1] data: only the mean survives.
  try {
    sparse_sample(corpus[0].sequence, 45, dmdsp::default_gamma_grid(), dmdsp::SweepOptions{});
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooShort);
  }
}
