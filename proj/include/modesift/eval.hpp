#pragma once

#include "modesift/features.hpp"
#include "modesift/sampling.hpp"
#include "modesift/seqio.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace modesift::eval {

struct ManifestEntry {
  std::string sample_id;
  std::string subject_id;
  std::string label;
  std::filesystem::path path;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

class CorpusManifest {
 public:
  CorpusManifest() = default;
  // Throws MalformedManifest on duplicate or empty sample ids.
  explicit CorpusManifest(std::vector<ManifestEntry> entries);

  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  // Distinct labels in lexicographic order.
  const std::vector<std::string>& class_set() const noexcept { return class_set_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<ManifestEntry> entries_;
  std::vector<std::string> class_set_;
};

// CSV with header sample_id,subject_id,label,path (columns in any order).
// Relative paths are resolved against the manifest's directory.
CorpusManifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const CorpusManifest& manifest);

enum class Protocol { Loso, Lovo };
std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view name);

struct Fold {
  std::string name;                 // held-out subject or sample id
  std::vector<std::size_t> train;   // indices into manifest entries
  std::vector<std::size_t> test;
};

// LOSO folds follow first appearance of each subject; LOVO follows entry order.
std::vector<Fold> make_folds(const CorpusManifest& manifest, Protocol protocol);

struct ClassMetrics {
  std::string label;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double rr = 0.0;
  double pr = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;  // class_set order
  double macro_f1 = 0.0;
  double macro_rr = 0.0;
  double macro_pr = 0.0;
  double acc = 0.0;
  std::size_t samples = 0;
};

// Confusion counts for one class set; merging is exact and associative.
struct ConfusionCounts {
  std::vector<std::string> classes;
  std::vector<std::size_t> tp, fp, fn;

  static ConfusionCounts zero(std::vector<std::string> classes);
  void add(const std::string& truth, const std::string& predicted);
  void merge(const ConfusionCounts& other);
  MetricsReport report() const;
};

// Throws LengthMismatch on unequal lengths, LabelOutsideClassSet on labels
// not in `class_set`.
MetricsReport score(const std::vector<std::string>& truth, const std::vector<std::string>& predicted,
                    const std::vector<std::string>& class_set);

// Per-class and macro rates averaged over folds; counts are summed.
MetricsReport fold_average(const std::vector<MetricsReport>& folds);

class Classifier {
 public:
  virtual ~Classifier() = default;
  // Rows of `x` are samples.
  virtual void fit(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) = 0;
  virtual std::vector<std::string> predict(const Eigen::MatrixXd& x) const = 0;
};

struct KernelRidgeParams {
  double c = 1e4;   // ridge term is 1/c
  double g = 0.5;   // k(x, y) = exp(-g |x - y|^2)

  friend bool operator==(const KernelRidgeParams&, const KernelRidgeParams&) = default;
};

// One-vs-rest kernel regularized least squares with +-1 targets. Ties in
// the class scores go to the lexicographically smallest label.
class KernelRidgeClassifier : public Classifier {
 public:
  explicit KernelRidgeClassifier(KernelRidgeParams params = {}) : params_(params) {}

  void fit(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) override;
  // Like fit, but throws EmptyClass if a listed class has no training sample.
  void fit(const Eigen::MatrixXd& x, const std::vector<std::string>& labels,
           const std::vector<std::string>& classes);
  std::vector<std::string> predict(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd decision_scores(const Eigen::MatrixXd& x) const;

  const std::vector<std::string>& classes() const noexcept { return classes_; }

 private:
  KernelRidgeParams params_;
  std::vector<std::string> classes_;
  Eigen::MatrixXd train_;
  Eigen::MatrixXd coef_;  // n_train x n_classes
};

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double g);

// sample_id,predicted_label
std::map<std::string, std::string> read_predictions(const std::filesystem::path& path);

struct ExperimentConfig {
  sampling::SamplingConfig sampling;
  features::LbptopConfig lbp;
  Protocol protocol = Protocol::Loso;
  std::size_t resize_rows = 0;  // 0 keeps the sampled frame size
  std::size_t resize_cols = 0;
  KernelRidgeParams classifier;
  int threads = 0;              // 0 = OpenMP default
};

using SequenceSource = std::function<FrameSequence(const ManifestEntry&)>;
FrameSequence load_entry(const ManifestEntry& e);

struct SampleFailure {
  std::string sample_id;
  std::string stage;  // load, sample, features, classify, import
  std::string code;
  std::string message;
};

struct Prediction {
  std::string sample_id;
  std::string subject_id;
  std::string truth;
  std::string predicted;
  std::string fold;
};

struct FoldReport {
  std::string name;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  MetricsReport metrics;
  std::optional<std::string> error;
};

struct ExperimentReport {
  std::vector<std::string> class_set;
  Protocol protocol = Protocol::Loso;
  MetricsReport pooled;         // primary
  MetricsReport fold_averaged;
  std::vector<FoldReport> folds;
  std::vector<Prediction> predictions;  // manifest order
  std::vector<SampleFailure> failures;
};

struct SampleFeatures {
  std::vector<std::optional<std::vector<double>>> values;  // manifest order
  std::vector<SampleFailure> failures;
};

// Sampling, resizing and LBPTOP for every entry; per-sample errors are
// collected instead of thrown.
SampleFeatures extract_features(const CorpusManifest& manifest, const ExperimentConfig& config,
                                const SequenceSource& source = load_entry);

ExperimentReport run_experiment(const CorpusManifest& manifest, const ExperimentConfig& config,
                                const SequenceSource& source = load_entry);

// Scores externally produced predictions under the same folds.
ExperimentReport score_imported(const CorpusManifest& manifest, Protocol protocol,
                                const std::map<std::string, std::string>& predictions);

// Per-sample seed for random sampling, derived from the run seed and index.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

std::string report_json(const ExperimentReport& report);
std::string report_markdown(const ExperimentReport& report);
void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions);

}  // namespace modesift::eval
