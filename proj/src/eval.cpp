#include "modesift/eval.hpp"

#include "modesift/error.hpp"
#include "modesift/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace modesift::eval {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

SampleFailure failure_from(const std::string& id, const std::string& stage, const std::exception& e) {
  if (const auto* me = dynamic_cast<const Error*>(&e)) {
    return {id, stage, std::string(to_string(me->code())), me->what()};
  }
  return {id, stage, "Internal", e.what()};
}

}  // namespace

CorpusManifest::CorpusManifest(std::vector<ManifestEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> ids;
  std::set<std::string> labels;
  for (const auto& e : entries_) {
    require(!e.sample_id.empty(), ErrorCode::MalformedManifest, "empty sample_id");
    require(!e.subject_id.empty(), ErrorCode::MalformedManifest,
            "empty subject_id for sample '" + e.sample_id + "'");
    require(!e.label.empty(), ErrorCode::MalformedManifest,
            "empty label for sample '" + e.sample_id + "'");
    require(ids.insert(e.sample_id).second, ErrorCode::MalformedManifest,
            "duplicate sample_id '" + e.sample_id + "'");
    labels.insert(e.label);
  }
  class_set_.assign(labels.begin(), labels.end());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open manifest " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::MalformedManifest,
          path.string() + ": empty manifest");
  const auto header = split_csv(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
  for (const char* name : {"sample_id", "subject_id", "label", "path"}) {
    require(col.count(name) == 1, ErrorCode::MalformedManifest,
            path.string() + ": missing column '" + name + "'");
  }
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    require(cells.size() == header.size(), ErrorCode::MalformedManifest,
            path.string() + ":" + std::to_string(lineno) + ": expected " +
                std::to_string(header.size()) + " fields");
    ManifestEntry e{trim(cells[col["sample_id"]]), trim(cells[col["subject_id"]]),
                    trim(cells[col["label"]]), trim(cells[col["path"]])};
    if (!e.path.empty() && e.path.is_relative()) e.path = base / e.path;
    entries.push_back(std::move(e));
  }
  return CorpusManifest(std::move(entries));
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest) {
  out << "sample_id,subject_id,label,path\n";
  for (const auto& e : manifest.entries()) {
    out << e.sample_id << ',' << e.subject_id << ',' << e.label << ',' << e.path.string() << '\n';
  }
}

std::string_view to_string(Protocol p) { return p == Protocol::Loso ? "loso" : "lovo"; }

Protocol protocol_from_string(std::string_view name) {
  if (name == "loso") return Protocol::Loso;
  if (name == "lovo") return Protocol::Lovo;
  fail(ErrorCode::InvalidArgument, "unknown protocol '" + std::string(name) + "'");
}

std::vector<Fold> make_folds(const CorpusManifest& manifest, Protocol protocol) {
  const auto& entries = manifest.entries();
  std::vector<Fold> folds;
  if (protocol == Protocol::Lovo) {
    require(entries.size() >= 2, ErrorCode::InsufficientSamples,
            "LOVO needs at least two samples");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      Fold f{entries[i].sample_id, {}, {i}};
      for (std::size_t j = 0; j < entries.size(); ++j) {
        if (j != i) f.train.push_back(j);
      }
      folds.push_back(std::move(f));
    }
    return folds;
  }
  std::vector<std::string> subjects;
  for (const auto& e : entries) {
    if (std::find(subjects.begin(), subjects.end(), e.subject_id) == subjects.end()) {
      subjects.push_back(e.subject_id);
    }
  }
  require(subjects.size() >= 2, ErrorCode::InsufficientSubjects,
          "LOSO needs at least two subjects, found " + std::to_string(subjects.size()));
  for (const auto& s : subjects) {
    Fold f{s, {}, {}};
    for (std::size_t j = 0; j < entries.size(); ++j) {
      (entries[j].subject_id == s ? f.test : f.train).push_back(j);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

ConfusionCounts ConfusionCounts::zero(std::vector<std::string> classes) {
  ConfusionCounts c;
  const auto n = classes.size();
  c.classes = std::move(classes);
  c.tp.assign(n, 0);
  c.fp.assign(n, 0);
  c.fn.assign(n, 0);
  return c;
}

void ConfusionCounts::add(const std::string& truth, const std::string& predicted) {
  const auto find = [this](const std::string& l) {
    const auto it = std::find(classes.begin(), classes.end(), l);
    require(it != classes.end(), ErrorCode::LabelOutsideClassSet,
            "label '" + l + "' is not in the class set");
    return static_cast<std::size_t>(it - classes.begin());
  };
  const std::size_t t = find(truth);
  const std::size_t p = find(predicted);
  if (t == p) {
    ++tp[t];
  } else {
    ++fn[t];
    ++fp[p];
  }
}

void ConfusionCounts::merge(const ConfusionCounts& other) {
  require(other.classes == classes, ErrorCode::InvalidArgument,
          "cannot merge confusion counts over different class sets");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    tp[i] += other.tp[i];
    fp[i] += other.fp[i];
    fn[i] += other.fn[i];
  }
}

MetricsReport ConfusionCounts::report() const {
  MetricsReport r;
  std::size_t tp_sum = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ClassMetrics m{classes[i], tp[i], fp[i], fn[i]};
    m.rr = ratio(tp[i], tp[i] + fn[i]);
    m.pr = ratio(tp[i], tp[i] + fp[i]);
    m.f1 = (m.rr + m.pr) > 0.0 ? 2.0 * m.rr * m.pr / (m.rr + m.pr) : 0.0;
    r.macro_rr += m.rr;
    r.macro_pr += m.pr;
    r.macro_f1 += m.f1;
    tp_sum += tp[i];
    r.samples += tp[i] + fn[i];
    r.per_class.push_back(std::move(m));
  }
  if (!classes.empty()) {
    const auto n = static_cast<double>(classes.size());
    r.macro_rr /= n;
    r.macro_pr /= n;
    r.macro_f1 /= n;
  }
  r.acc = ratio(tp_sum, r.samples);
  return r;
}

MetricsReport score(const std::vector<std::string>& truth, const std::vector<std::string>& predicted,
                    const std::vector<std::string>& class_set) {
  require(truth.size() == predicted.size(), ErrorCode::LengthMismatch,
          "truth and prediction lists differ in length");
  ConfusionCounts c = ConfusionCounts::zero(class_set);
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], predicted[i]);
  return c.report();
}

MetricsReport fold_average(const std::vector<MetricsReport>& folds) {
  MetricsReport avg;
  if (folds.empty()) return avg;
  avg.per_class = folds.front().per_class;
  for (auto& m : avg.per_class) m = ClassMetrics{m.label};
  for (const auto& f : folds) {
    require(f.per_class.size() == avg.per_class.size(), ErrorCode::InvalidArgument,
            "fold reports have different class sets");
    for (std::size_t i = 0; i < f.per_class.size(); ++i) {
      auto& a = avg.per_class[i];
      const auto& m = f.per_class[i];
      a.tp += m.tp;
      a.fp += m.fp;
      a.fn += m.fn;
      a.rr += m.rr;
      a.pr += m.pr;
      a.f1 += m.f1;
    }
    avg.macro_f1 += f.macro_f1;
    avg.macro_rr += f.macro_rr;
    avg.macro_pr += f.macro_pr;
    avg.acc += f.acc;
    avg.samples += f.samples;
  }
  const auto n = static_cast<double>(folds.size());
  for (auto& a : avg.per_class) {
    a.rr /= n;
    a.pr /= n;
    a.f1 /= n;
  }
  avg.macro_f1 /= n;
  avg.macro_rr /= n;
  avg.macro_pr /= n;
  avg.acc /= n;
  return avg;
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double g) {
  const Eigen::VectorXd na = a.rowwise().squaredNorm();
  const Eigen::VectorXd nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (a * b.transpose());
  d2.colwise() += na;
  d2.rowwise() += nb.transpose();
  return (-g * d2.cwiseMax(0.0)).array().exp().matrix();
}

void KernelRidgeClassifier::fit(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  fit(x, labels, std::vector<std::string>(distinct.begin(), distinct.end()));
}

void KernelRidgeClassifier::fit(const Eigen::MatrixXd& x, const std::vector<std::string>& labels,
                                const std::vector<std::string>& classes) {
  require(params_.c > 0.0 && params_.g > 0.0, ErrorCode::InvalidArgument,
          "classifier parameters c and g must be positive");
  require(static_cast<std::size_t>(x.rows()) == labels.size(), ErrorCode::LengthMismatch,
          "feature rows and labels differ in count");
  require(!labels.empty() && !classes.empty(), ErrorCode::EmptyClass, "no training samples");
  // Members are only touched once every check has passed.
  std::vector<std::string> cls = classes;
  std::sort(cls.begin(), cls.end());
  cls.erase(std::unique(cls.begin(), cls.end()), cls.end());

  const auto n = x.rows();
  const auto k = static_cast<Eigen::Index>(cls.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(n, k, -1.0);
  std::vector<std::size_t> counts(cls.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = std::find(cls.begin(), cls.end(), labels[static_cast<std::size_t>(i)]);
    require(it != cls.end(), ErrorCode::LabelOutsideClassSet,
            "training label '" + labels[static_cast<std::size_t>(i)] + "' not in class list");
    const auto c = it - cls.begin();
    y(i, c) = 1.0;
    ++counts[static_cast<std::size_t>(c)];
  }
  for (std::size_t c = 0; c < cls.size(); ++c) {
    require(counts[c] > 0, ErrorCode::EmptyClass, "class '" + cls[c] + "' has no training sample");
  }

  Eigen::MatrixXd kmat = rbf_kernel(x, x, params_.g);
  kmat.diagonal().array() += 1.0 / params_.c;
  coef_ = kmat.ldlt().solve(y);
  train_ = x;
  classes_ = std::move(cls);
}

Eigen::MatrixXd KernelRidgeClassifier::decision_scores(const Eigen::MatrixXd& x) const {
  require(!classes_.empty(), ErrorCode::InvalidArgument, "classifier is not fitted");
  require(x.cols() == train_.cols(), ErrorCode::DimensionMismatch,
          "feature dimension differs from training data");
  return rbf_kernel(x, train_, params_.g) * coef_;
}

std::vector<std::string> KernelRidgeClassifier::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd s = decision_scores(x);
  std::vector<std::string> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.cols(); ++c) {
      if (s(i, c) > s(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = classes_[static_cast<std::size_t>(best)];
  }
  return out;
}

std::map<std::string, std::string> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open predictions " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::MalformedData,
          path.string() + ": empty predictions file");
  const auto header = split_csv(line);
  std::size_t id_col = header.size(), label_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == "sample_id") id_col = i;
    if (trim(header[i]) == "predicted_label") label_col = i;
  }
  require(id_col < header.size() && label_col < header.size(), ErrorCode::MalformedData,
          path.string() + ": header must contain sample_id,predicted_label");
  std::map<std::string, std::string> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    require(cells.size() == header.size(), ErrorCode::MalformedData,
            path.string() + ": malformed row '" + line + "'");
    const auto id = trim(cells[id_col]);
    require(out.emplace(id, trim(cells[label_col])).second, ErrorCode::MalformedData,
            path.string() + ": duplicate prediction for '" + id + "'");
  }
  return out;
}

FrameSequence load_entry(const ManifestEntry& e) {
  return load_sequence(e.path).with_source_id(e.sample_id);
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  sampling::SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1)));
  return rng.next();
}

SampleFeatures extract_features(const CorpusManifest& manifest, const ExperimentConfig& config,
                                const SequenceSource& source) {
  const auto& entries = manifest.entries();
  const std::size_t n = entries.size();
  SampleFeatures out;
  out.values.resize(n);
  std::vector<std::optional<SampleFailure>> failed(n);

  ScopedThreadCount threads(config.threads);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto& e = entries[i];
    std::string stage = "load";
    try {
      FrameSequence seq = source(e);
      stage = "sample";
      sampling::SamplingConfig sc = config.sampling;
      sc.seed = sample_seed(config.sampling.seed, i);
      FrameSequence sampled = sampling::apply(seq, sc).sequence;
      if (config.resize_rows > 0 && config.resize_cols > 0) {
        sampled = resize(sampled, config.resize_rows, config.resize_cols);
      }
      stage = "features";
      out.values[i] = features::lbptop(sampled, config.lbp).values;
    } catch (const std::exception& ex) {
      failed[i] = failure_from(e.sample_id, stage, ex);
    }
  }
  for (auto& f : failed) {
    if (f) out.failures.push_back(std::move(*f));
  }
  return out;
}

namespace {

struct FoldOutcome {
  FoldReport report;
  std::vector<std::pair<std::size_t, std::string>> predicted;  // entry index, label
  std::optional<SampleFailure> failure;
};

ExperimentReport assemble(const CorpusManifest& manifest, Protocol protocol,
                          const std::vector<Fold>& folds, std::vector<FoldOutcome>& outcomes,
                          std::vector<SampleFailure> failures) {
  const auto& entries = manifest.entries();
  ExperimentReport rep;
  rep.class_set = manifest.class_set();
  rep.protocol = protocol;
  rep.failures = std::move(failures);

  std::vector<std::optional<Prediction>> slots(entries.size());
  ConfusionCounts pooled = ConfusionCounts::zero(rep.class_set);
  std::vector<MetricsReport> scored;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto& o = outcomes[f];
    ConfusionCounts counts = ConfusionCounts::zero(rep.class_set);
    for (const auto& [idx, label] : o.predicted) {
      counts.add(entries[idx].label, label);
      slots[idx] = Prediction{entries[idx].sample_id, entries[idx].subject_id, entries[idx].label,
                              label, folds[f].name};
    }
    o.report.metrics = counts.report();
    if (!o.predicted.empty()) scored.push_back(o.report.metrics);
    pooled.merge(counts);
    if (o.failure) rep.failures.push_back(*o.failure);
    rep.folds.push_back(o.report);
  }
  for (auto& p : slots) {
    if (p) rep.predictions.push_back(std::move(*p));
  }
  rep.pooled = pooled.report();
  rep.fold_averaged = scored.empty() ? ConfusionCounts::zero(rep.class_set).report()
                                     : fold_average(scored);
  std::stable_sort(rep.failures.begin(), rep.failures.end(),
                   [&](const SampleFailure& a, const SampleFailure& b) {
                     return a.sample_id < b.sample_id;
                   });
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const CorpusManifest& manifest, const ExperimentConfig& config,
                                const SequenceSource& source) {
  require(manifest.class_set().size() >= 2, ErrorCode::InvalidArgument,
          "classification needs at least two classes");
  const auto folds = make_folds(manifest, config.protocol);
  SampleFeatures feats = extract_features(manifest, config, source);
  const auto& entries = manifest.entries();
  const Eigen::Index dim = static_cast<Eigen::Index>(config.lbp.dimension());

  std::vector<FoldOutcome> outcomes(folds.size());
  ScopedThreadCount threads(config.threads);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ff = 0; ff < static_cast<std::ptrdiff_t>(folds.size()); ++ff) {
    const auto f = static_cast<std::size_t>(ff);
    const Fold& fold = folds[f];
    FoldOutcome& o = outcomes[f];
    o.report.name = fold.name;
    std::vector<std::size_t> train, test;
    for (auto i : fold.train) {
      if (feats.values[i]) train.push_back(i);
    }
    for (auto i : fold.test) {
      if (feats.values[i]) test.push_back(i);
    }
    o.report.n_train = train.size();
    o.report.n_test = test.size();
    if (test.empty()) continue;
    try {
      require(!train.empty(), ErrorCode::EmptyClass, "fold has no usable training samples");
      Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train.size()), dim);
      std::vector<std::string> ytr;
      for (std::size_t r = 0; r < train.size(); ++r) {
        xtr.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(feats.values[train[r]]->data(), dim);
        ytr.push_back(entries[train[r]].label);
      }
      Eigen::MatrixXd xte(static_cast<Eigen::Index>(test.size()), dim);
      for (std::size_t r = 0; r < test.size(); ++r) {
        xte.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(feats.values[test[r]]->data(), dim);
      }
      KernelRidgeClassifier clf(config.classifier);
      clf.fit(xtr, ytr);
      const auto pred = clf.predict(xte);
      for (std::size_t r = 0; r < test.size(); ++r) o.predicted.emplace_back(test[r], pred[r]);
    } catch (const std::exception& ex) {
      o.report.error = ex.what();
      o.failure = failure_from("fold:" + fold.name, "classify", ex);
    }
  }
  return assemble(manifest, config.protocol, folds, outcomes, std::move(feats.failures));
}

ExperimentReport score_imported(const CorpusManifest& manifest, Protocol protocol,
                                const std::map<std::string, std::string>& predictions) {
  const auto folds = make_folds(manifest, protocol);
  const auto& entries = manifest.entries();
  std::vector<FoldOutcome> outcomes(folds.size());
  std::vector<SampleFailure> failures;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    outcomes[f].report.name = folds[f].name;
    outcomes[f].report.n_train = folds[f].train.size();
    for (auto i : folds[f].test) {
      const auto it = predictions.find(entries[i].sample_id);
      if (it == predictions.end()) {
        failures.push_back({entries[i].sample_id, "import", "MissingPrediction",
                            "no prediction for sample '" + entries[i].sample_id + "'"});
        continue;
      }
      const auto& cs = manifest.class_set();
      require(std::find(cs.begin(), cs.end(), it->second) != cs.end(),
              ErrorCode::LabelOutsideClassSet,
              "predicted label '" + it->second + "' is not in the class set");
      outcomes[f].predicted.emplace_back(i, it->second);
    }
    outcomes[f].report.n_test = outcomes[f].predicted.size();
  }
  return assemble(manifest, protocol, folds, outcomes, std::move(failures));
}

namespace {

nlohmann::ordered_json metrics_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (const auto& c : m.per_class) {
    classes.push_back({{"label", c.label}, {"TP", c.tp}, {"FP", c.fp}, {"FN", c.fn},
                       {"RR", c.rr}, {"PR", c.pr}, {"F1", c.f1}});
  }
  j["per_class"] = std::move(classes);
  j["macro_F1"] = m.macro_f1;
  j["macro_RR"] = m.macro_rr;
  j["macro_PR"] = m.macro_pr;
  j["ACC"] = m.acc;
  j["samples"] = m.samples;
  return j;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["aggregation"] = "pooled";
  j["protocol"] = std::string(to_string(report.protocol));
  j["class_set"] = report.class_set;
  j["pooled"] = metrics_json(report.pooled);
  j["fold_averaged"] = metrics_json(report.fold_averaged);
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : report.folds) {
    nlohmann::ordered_json fj;
    fj["name"] = f.name;
    fj["n_train"] = f.n_train;
    fj["n_test"] = f.n_test;
    fj["metrics"] = metrics_json(f.metrics);
    if (f.error) fj["error"] = *f.error;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  nlohmann::ordered_json fails = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) {
    fails.push_back({{"sample_id", f.sample_id}, {"stage", f.stage}, {"code", f.code},
                     {"message", f.message}});
  }
  j["failures"] = std::move(fails);
  return j.dump(2) + "\n";
}

std::string report_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  out << "Protocol: " << to_string(report.protocol) << ", aggregation: pooled confusion counts over "
      << report.pooled.samples << " test samples";
  if (!report.failures.empty()) out << " (" << report.failures.size() << " failures)";
  out << "\n\n";
  out << "| Class | TP | FP | FN | RR | PR | F1 |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& c : report.pooled.per_class) {
    out << "| " << c.label << " | " << c.tp << " | " << c.fp << " | " << c.fn << " | "
        << fmt4(c.rr) << " | " << fmt4(c.pr) << " | " << fmt4(c.f1) << " |\n";
  }
  out << "| Average | | | | " << fmt4(report.pooled.macro_rr) << " | "
      << fmt4(report.pooled.macro_pr) << " | " << fmt4(report.pooled.macro_f1) << " |\n";
  out << "\nACC " << fmt4(report.pooled.acc) << "; fold-averaged macro-F1 "
      << fmt4(report.fold_averaged.macro_f1) << ", ACC " << fmt4(report.fold_averaged.acc) << "\n";
  return out.str();
}

void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions) {
  out << "sample_id,predicted_label\n";
  for (const auto& p : predictions) out << p.sample_id << ',' << p.predicted << '\n';
}

}  // namespace modesift::eval
