#include "modesift/error.hpp"
#include "modesift/eval.hpp"
#include "oracles.hpp"
#include "scratch.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

using namespace modesift;
using namespace modesift::eval;

namespace {

// Subjects with 4, 3 and 2 samples; labels cycle x, y, z.
CorpusManifest three_subjects() {
  std::vector<ManifestEntry> e;
  const char* subj[] = {"p", "p", "q", "p", "r", "q", "p", "q", "r"};
  const char* lab[] = {"x", "y", "z"};
  for (int i = 0; i < 9; ++i) {
    e.push_back({"v" + std::to_string(i), subj[i], lab[i % 3], "v" + std::to_string(i) + ".msq"});
  }
  return CorpusManifest(std::move(e));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected modesift::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("loso folds follow first appearance") {
  const auto folds = make_folds(three_subjects(), Protocol::Loso);
  REQUIRE(folds.size() == 3);
  CHECK(folds[0].name == "p");
  CHECK(folds[0].test == std::vector<std::size_t>{0, 1, 3, 6});
  CHECK(folds[1].test.size() == 3);
  CHECK(folds[2].test.size() == 2);
  for (const auto& f : folds) {
    CHECK(f.train.size() + f.test.size() == 9);
    std::set<std::size_t> all(f.train.begin(), f.train.end());
    for (auto i : f.test) CHECK(all.insert(i).second);
  }
}

TEST_CASE("lovo holds out one sample at a time") {
  const auto folds = make_folds(three_subjects(), Protocol::Lovo);
  REQUIRE(folds.size() == 9);
  CHECK(folds[4].name == "v4");
  CHECK(folds[4].test == std::vector<std::size_t>{4});
  CHECK(folds[4].train.size() == 8);
}

TEST_CASE("fold preconditions") {
  const CorpusManifest one({{"a", "s", "x", "a"}, {"b", "s", "y", "b"}});
  CHECK(code_of([&] { make_folds(one, Protocol::Loso); }) == ErrorCode::InsufficientSubjects);
  const CorpusManifest tiny({{"a", "s", "x", "a"}});
  CHECK(code_of([&] { make_folds(tiny, Protocol::Lovo); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("manifest validation and class order") {
  const auto m = three_subjects();
  CHECK(m.class_set() == std::vector<std::string>{"x", "y", "z"});
  CHECK(code_of([] { CorpusManifest({{"a", "s", "x", "a"}, {"a", "t", "y", "b"}}); }) ==
        ErrorCode::MalformedManifest);
  CHECK(code_of([] { CorpusManifest({{"a", "", "x", "a"}}); }) == ErrorCode::MalformedManifest);
}

TEST_CASE("manifest csv resolves relative paths") {
  const auto dir = testutil::scratch("manifest");
  {
    std::ofstream out(dir / "m.csv");
    out << "label,path,sample_id,subject_id\nhappy,clips/a.msq,a,s1\nsad,/abs/b.msq,b,s2\n";
  }
  const auto m = read_manifest(dir / "m.csv");
  REQUIRE(m.size() == 2);
  CHECK(m.entries()[0].path == dir / "clips/a.msq");
  CHECK(m.entries()[1].path == "/abs/b.msq");
  CHECK(m.entries()[1].label == "sad");
  {
    std::ofstream out(dir / "bad.csv");
    out << "sample_id,label,path\na,x,a.msq\n";
  }
  CHECK(code_of([&] { read_manifest(dir / "bad.csv"); }) == ErrorCode::MalformedManifest);
}

TEST_CASE("metrics against hand counts") {
  const std::vector<std::string> cs{"a", "b", "c", "d"};
  const std::vector<std::string> t{"a", "a", "a", "b", "b", "c", "c", "c"};
  const std::vector<std::string> p{"a", "a", "b", "b", "c", "c", "a", "c"};
  const auto r = score(t, p, cs);
  const auto ha = oracle::hand_metrics(2, 1, 1);
  CHECK(r.per_class[0].tp == 2);
  CHECK(r.per_class[0].rr == doctest::Approx(ha.rr));
  CHECK(r.per_class[0].pr == doctest::Approx(ha.pr));
  CHECK(r.per_class[0].f1 == doctest::Approx(ha.f1));
  // d never occurs on either side.
  CHECK(r.per_class[3].rr == 0.0);
  CHECK(r.per_class[3].pr == 0.0);
  CHECK(r.per_class[3].f1 == 0.0);
  double f1 = 0.0;
  for (const auto& c : r.per_class) f1 += c.f1;
  CHECK(r.macro_f1 == doctest::Approx(f1 / 4));
  CHECK(r.acc == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("perfect predictions") {
  const std::vector<std::string> t{"x", "y", "z", "y"};
  const auto r = score(t, t, {"x", "y", "z"});
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.acc == 1.0);
}

TEST_CASE("score is order independent and validates input") {
  std::vector<std::string> t{"a", "b", "a", "c", "b", "a"}, p{"a", "a", "c", "c", "b", "b"};
  const auto r = score(t, p, {"a", "b", "c"});
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<std::string> tp, pp;
  for (auto i : perm) {
    tp.push_back(t[i]);
    pp.push_back(p[i]);
  }
  const auto q = score(tp, pp, {"a", "b", "c"});
  CHECK(q.macro_f1 == r.macro_f1);
  CHECK(q.acc == r.acc);
  CHECK(code_of([&] { score(t, {"a"}, {"a", "b", "c"}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { score({"a"}, {"q"}, {"a", "b", "c"}); }) == ErrorCode::LabelOutsideClassSet);
}

TEST_CASE("confusion merge equals one pass") {
  const std::vector<std::string> cs{"a", "b"};
  auto x = ConfusionCounts::zero(cs), y = ConfusionCounts::zero(cs), all = ConfusionCounts::zero(cs);
  x.add("a", "b");
  x.add("b", "b");
  y.add("a", "a");
  for (auto [t, p] : {std::pair{"a", "b"}, {"b", "b"}, {"a", "a"}}) all.add(t, p);
  x.merge(y);
  CHECK(x.tp == all.tp);
  CHECK(x.fp == all.fp);
  CHECK(x.fn == all.fn);
}

TEST_CASE("fold average") {
  const auto a = score({"x", "y"}, {"x", "y"}, {"x", "y"});
  const auto b = score({"x", "y"}, {"y", "y"}, {"x", "y"});
  const auto avg = fold_average({a, b});
  CHECK(avg.macro_f1 == doctest::Approx((a.macro_f1 + b.macro_f1) / 2));
  CHECK(avg.per_class[0].tp == 1);
  CHECK(avg.samples == 4);
}

TEST_CASE("kernel ridge separates two blobs") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.3);
  Eigen::MatrixXd x(40, 3);
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    const double c = i % 2 ? 1.5 : -1.5;
    for (int k = 0; k < 3; ++k) x(i, k) = c + g(rng);
    y.push_back(i % 2 ? "pos" : "neg");
  }
  KernelRidgeClassifier clf({100.0, 0.5});
  clf.fit(x.topRows(30), {y.begin(), y.begin() + 30});
  CHECK(clf.classes() == std::vector<std::string>{"neg", "pos"});
  const auto pred = clf.predict(x.bottomRows(10));
  CHECK(std::equal(pred.begin(), pred.end(), y.begin() + 30));
}

TEST_CASE("kernel ridge edge cases") {
  const Eigen::MatrixXd x = synth::random_matrix(5, 2, 1);
  KernelRidgeClassifier one;
  one.fit(x, std::vector<std::string>(5, "only"));
  for (const auto& p : one.predict(x)) CHECK(p == "only");

  KernelRidgeClassifier clf;
  CHECK(code_of([&] { clf.fit(x, {"a", "a", "b", "b", "a"}, {"a", "b", "c"}); }) ==
        ErrorCode::EmptyClass);
  CHECK(code_of([&] { clf.predict(x); }) == ErrorCode::InvalidArgument);

  const Eigen::MatrixXd k = rbf_kernel(x, x, 0.7);
  for (int i = 0; i < 5; ++i) CHECK(k(i, i) == doctest::Approx(1.0));
  CHECK(k(1, 3) == doctest::Approx(std::exp(-0.7 * (x.row(1) - x.row(3)).squaredNorm())));
}

TEST_CASE("imported predictions are scored on the same folds") {
  const auto m = three_subjects();
  std::map<std::string, std::string> pred;
  for (const auto& e : m.entries()) pred[e.sample_id] = e.label;
  pred.erase("v8");
  const auto r = score_imported(m, Protocol::Loso, pred);
  CHECK(r.pooled.samples == 8);
  CHECK(r.pooled.macro_f1 == 1.0);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].sample_id == "v8");
  CHECK(r.failures[0].stage == "import");
  CHECK(report_json(r).find("\"aggregation\": \"pooled\"") != std::string::npos);
  CHECK(report_markdown(r).find("| Class | TP | FP | FN | RR | PR | F1 |") != std::string::npos);

  pred["v8"] = "nope";
  CHECK(code_of([&] { score_imported(m, Protocol::Loso, pred); }) == ErrorCode::LabelOutsideClassSet);
}

TEST_CASE("per-sample seeds") {
  CHECK(sample_seed(1, 0) == sample_seed(1, 0));
  CHECK(sample_seed(1, 0) != sample_seed(1, 1));
  CHECK(sample_seed(1, 0) != sample_seed(2, 0));
}

TEST_CASE("experiment collects per-sample failures") {
  synth::CorpusOptions o;
  o.subjects = 3;
  o.per_subject = 3;
  o.rows = 30;
  o.cols = 30;
  o.frames = 20;
  const auto corpus = synth::face_corpus(o);
  const auto m = synth::manifest_of(corpus);
  ExperimentConfig cfg;
  cfg.lbp.normalize = true;
  const SequenceSource src = [&](const ManifestEntry& e) {
    if (e.sample_id == "s2_2") fail(ErrorCode::IoFailure, "unreadable");
    for (const auto& c : corpus) {
      if (c.entry.sample_id == e.sample_id) return c.sequence;
    }
    fail(ErrorCode::IoFailure, "unknown");
  };
  const auto r = run_experiment(m, cfg, src);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].stage == "load");
  CHECK(r.failures[0].code == "IoFailure");
  CHECK(r.pooled.samples == 8);
  CHECK(r.predictions.size() == 8);
  CHECK(r.folds.size() == 3);
}
