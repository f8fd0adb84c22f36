#include "cli.hpp"

#include "modesift/analysis.hpp"
#include "modesift/dmd.hpp"
#include "modesift/dmdsp.hpp"
#include "modesift/error.hpp"
#include "modesift/eval.hpp"
#include "modesift/features.hpp"
#include "modesift/parallel.hpp"
#include "modesift/run_config.hpp"
#include "modesift/sampling.hpp"
#include "modesift/seqio.hpp"
#include "modesift/tim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;

namespace modesift::cli {

namespace {

class Log {
 public:
  explicit Log(const std::string& level) : quiet_(level == "quiet" || level == "error"),
                                           debug_(level == "debug") {}
  void info(const std::string& msg) const {
    if (!quiet_) std::cerr << "modesift: " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (debug_) std::cerr << "modesift: " << msg << '\n';
  }

 private:
  bool quiet_;
  bool debug_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  require(out.good(), ErrorCode::IoFailure, "cannot write " + p.string());
  return out;
}

fs::path prepare_output(const RunConfig& cfg) {
  require(!cfg.output.empty(), ErrorCode::InvalidArgument, "--output directory is required");
  fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::IoFailure, "cannot create " + dir.string());
  return dir;
}

std::string stem_of(const std::string& input) {
  fs::path p(input);
  if (p.filename().empty()) p = p.parent_path();
  return p.stem().string();
}

const std::string& single_input(const RunConfig& cfg) {
  require(cfg.inputs.size() == 1, ErrorCode::InvalidArgument,
          "exactly one --input is required, got " + std::to_string(cfg.inputs.size()));
  return cfg.inputs.front();
}

dmd::DmdDecomposition decompose_file(const std::string& path, double rank_tol) {
  return dmd::decompose(to_snapshots(load_sequence(path)), rank_tol);
}

// --- subcommands -----------------------------------------------------------

void cmd_ingest(const RunConfig& cfg, const fs::path& out, const Log& log) {
  for (const auto& in : cfg.inputs) {
    FrameSequence seq = load_sequence(in);
    if (cfg.resize_rows > 0 && cfg.resize_cols > 0) {
      seq = resize(seq, cfg.resize_rows, cfg.resize_cols);
    }
    const fs::path dst = out / (stem_of(in) + ".msq");
    write_sequence(seq, dst, SequenceFormat::RawTensor);
    log.info(in + ": " + std::to_string(seq.frame_count()) + " frames of " +
             std::to_string(seq.rows()) + "x" + std::to_string(seq.cols()) + " at " + num(seq.fps()) +
             " fps -> " + dst.string());
  }
}

void cmd_dmd(const RunConfig& cfg, const fs::path& out, const Log& log) {
  const auto d = decompose_file(single_input(cfg), cfg.rank_tol);
  const auto spec = analysis::mode_frequencies(d);
  auto csv = open_out(out / "modes.csv");
  csv << "index,mu_re,mu_im,abs_mu,frequency_hz,growth_rate,alpha_re,alpha_im,abs_alpha\n";
  for (Eigen::Index i = 0; i < d.rank; ++i) {
    const auto mu = d.eigenvalues(i);
    const auto a = d.amplitudes(i);
    csv << i << ',' << num(mu.real()) << ',' << num(mu.imag()) << ',' << num(std::abs(mu)) << ','
        << num(spec.frequency_hz[static_cast<std::size_t>(i)]) << ','
        << num(spec.growth_rate[static_cast<std::size_t>(i)]) << ',' << num(a.real()) << ','
        << num(a.imag()) << ',' << num(std::abs(a)) << '\n';
  }
  nlohmann::ordered_json j;
  j["rank"] = d.rank;
  j["snapshots"] = d.snapshot_count;
  j["fps"] = d.fps;
  j["snapshot_energy"] = d.snapshot_energy;
  j["residual_outside_basis"] = d.residual_outside_basis;
  j["loss"] = dmd::loss(d, d.amplitudes);
  j["amplitude_fallback"] = d.amplitude_fallback;
  std::vector<double> sv(d.singular_values.data(), d.singular_values.data() + d.singular_values.size());
  j["singular_values"] = sv;
  open_out(out / "dmd.json") << j.dump(2) << '\n';
  log.info("rank " + std::to_string(d.rank) + " decomposition written to " + out.string());
}

std::vector<dmdsp::SparsityRecord> sweep_file(const RunConfig& cfg, const std::string& in) {
  const auto d = decompose_file(in, cfg.rank_tol);
  return dmdsp::gamma_sweep(d, cfg.gamma_grid(), cfg.sweep_options());
}

void cmd_sweep(const RunConfig& cfg, const fs::path& out, const Log& log) {
  const auto records = sweep_file(cfg, single_input(cfg));
  auto csv = open_out(out / "sweep.csv");
  analysis::write_sweep_csv(csv, records);
  std::size_t unconverged = 0;
  for (const auto& r : records) unconverged += r.admm_converged ? 0 : 1;
  if (unconverged) log.info(std::to_string(unconverged) + " grid points hit the ADMM iteration cap");
  log.info(std::to_string(records.size()) + " sweep rows written");
}

void cmd_gamma_curve(const RunConfig& cfg, const fs::path& out, const Log& log) {
  const auto curve = analysis::gamma_percentage_curve(sweep_file(cfg, single_input(cfg)));
  auto csv = open_out(out / "gamma_curve.csv");
  analysis::write_gamma_curve_csv(csv, curve);
  if (!curve.monotone()) {
    log.info("percentage is not monotone in gamma at " + std::to_string(curve.violations.size()) +
             " grid points");
  }
}

void cmd_tim(const RunConfig& cfg, const fs::path& out, const Log& log) {
  const auto& in = single_input(cfg);
  const FrameSequence seq = load_sequence(in);
  const std::size_t n_out = cfg.tim_frames > 0 ? cfg.tim_frames : seq.frame_count();
  const auto model = tim::fit(seq);
  const auto synth = tim::synthesize(model, n_out).with_source_id(seq.source_id());
  write_sequence(synth, out / (stem_of(in) + ".msq"), SequenceFormat::RawTensor);
  double worst = 0.0;
  for (double r : model.residuals) worst = std::max(worst, r);
  log.info(std::to_string(seq.frame_count()) + " -> " + std::to_string(n_out) +
           " frames; max fit residual " + num(worst));
}

void cmd_sample(const RunConfig& cfg, const fs::path& out, const Log& log) {
  require(!cfg.inputs.empty(), ErrorCode::InvalidArgument, "at least one --input is required");
  const auto sc = cfg.sampling_config();
  const std::size_t n = cfg.inputs.size();
  std::vector<std::optional<sampling::SampleResult>> results(n);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      auto c = sc;
      if (n > 1) c.seed = eval::sample_seed(cfg.seed, i);
      results[i] = sampling::apply(load_sequence(cfg.inputs[i]), c);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::ordered_json j;
    j["input"] = cfg.inputs[i];
    if (!results[i]) {
      ++failed;
      j["error"] = errors[i];
      log.info(cfg.inputs[i] + ": " + errors[i]);
      summary.push_back(std::move(j));
      continue;
    }
    const auto& r = *results[i];
    const auto name = stem_of(cfg.inputs[i]) + ".msq";
    write_sequence(r.sequence, out / name, SequenceFormat::RawTensor);
    j["output"] = name;
    j["strategy"] = std::string(sampling::to_string(r.strategy));
    j["frames"] = r.sequence.frame_count();
    j["fps"] = r.sequence.fps();
    if (r.gamma) j["gamma"] = *r.gamma;
    if (r.nnz) j["nnz"] = *r.nnz;
    if (r.rank) j["rank"] = *r.rank;
    if (r.loss) j["loss"] = *r.loss;
    if (r.percent_preserved) j["percent_preserved"] = *r.percent_preserved;
    if (!r.kept_indices.empty()) j["kept_indices"] = r.kept_indices;
    summary.push_back(std::move(j));
  }
  open_out(out / "sample.json") << summary.dump(2) << '\n';
  require(failed == 0, ErrorCode::InvalidArgument,
          std::to_string(failed) + " of " + std::to_string(n) + " inputs failed; see sample.json");
}

void cmd_spectrum(const RunConfig& cfg, const fs::path& out, const Log& log) {
  require(!cfg.inputs.empty(), ErrorCode::InvalidArgument, "at least one --input is required");
  const std::size_t n = cfg.inputs.size();
  std::vector<std::optional<dmd::DmdDecomposition>> decomps(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      decomps[i] = decompose_file(cfg.inputs[i], cfg.rank_tol);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<dmd::DmdDecomposition> all;
  for (auto& d : decomps) all.push_back(std::move(*d));
  const auto h = analysis::spectral_histogram(all, cfg.bin_width);
  auto csv = open_out(out / "spectrum.csv");
  analysis::write_spectrum_csv(csv, h);
  log.info(std::to_string(n) + " sequence(s), " + std::to_string(h.energy.size()) + " bins up to " +
           num(h.fps / 2.0) + " Hz");
}

void cmd_temporal(const RunConfig& cfg, const fs::path& out, const Log& log) {
  const auto& in = single_input(cfg);
  const FrameSequence seq = load_sequence(in);
  const std::size_t n = seq.frame_count();
  analysis::TemporalProfile profile;
  if (cfg.profile_mapping == "uniform_grid") {
    const std::size_t n_short = std::max<std::size_t>(3, sampling::target_length(n, cfg.percent));
    const auto shortened = tim::synthesize(tim::fit(seq), n_short);
    const auto d = dmd::decompose(to_snapshots(shortened), cfg.rank_tol);
    profile = analysis::temporal_profile(d, n, analysis::ProfileMapping::UniformGrid);
  } else {
    require(cfg.profile_mapping == "sparse_mask", ErrorCode::InvalidArgument,
            "unknown profile mapping '" + cfg.profile_mapping + "'");
    const auto d = dmd::decompose(to_snapshots(seq), cfg.rank_tol);
    if (cfg.percent >= 100.0) {
      profile = analysis::temporal_profile(d.amplitudes, n, analysis::ProfileMapping::SparseMask,
                                           dmdsp::SparsityStructure(static_cast<std::size_t>(d.rank), false));
    } else {
      const auto records = dmdsp::gamma_sweep(d, cfg.gamma_grid(), cfg.sweep_options());
      const auto& rec = dmdsp::select_percentage(records, cfg.percent);
      log.info("selected gamma " + num(rec.gamma) + " keeping " + std::to_string(rec.nnz) + " of " +
               std::to_string(d.rank) + " modes");
      profile = analysis::temporal_profile(rec.alpha_polished, n,
                                           analysis::ProfileMapping::SparseMask, rec.structure);
    }
  }
  auto csv = open_out(out / "profile.csv");
  analysis::write_profile_csv(csv, profile);
}

void cmd_lbptop(const RunConfig& cfg, const fs::path& out, const Log& log) {
  std::vector<eval::ManifestEntry> entries;
  if (!cfg.manifest.empty()) {
    entries = eval::read_manifest(cfg.manifest).entries();
  }
  for (const auto& in : cfg.inputs) entries.push_back({stem_of(in), "", "", in});
  require(!entries.empty(), ErrorCode::InvalidArgument, "give --input or --manifest");
  const auto lbp = cfg.lbptop_config();
  std::vector<features::FeatureRow> rows(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(entries.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      FrameSequence seq = load_sequence(entries[i].path);
      if (cfg.resize_rows > 0 && cfg.resize_cols > 0) {
        seq = resize(seq, cfg.resize_rows, cfg.resize_cols);
      }
      rows[i] = {entries[i].sample_id, entries[i].label, entries[i].subject_id,
                 features::lbptop(seq, lbp).values};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  auto csv = open_out(out / "features.csv");
  features::write_feature_csv(csv, rows);
  features::write_feature_matrix(out / "features.f32", rows);
  log.info(std::to_string(rows.size()) + " feature vectors of dimension " +
           std::to_string(lbp.dimension()));
}

void cmd_evaluate(const RunConfig& cfg, const fs::path& out, const Log& log) {
  require(!cfg.manifest.empty(), ErrorCode::InvalidArgument, "--manifest is required");
  const auto manifest = eval::read_manifest(cfg.manifest);
  eval::ExperimentReport report;
  if (cfg.classifier == "import") {
    require(!cfg.predictions.empty(), ErrorCode::InvalidArgument,
            "--classifier import needs --predictions FILE");
    report = eval::score_imported(manifest, eval::protocol_from_string(cfg.protocol),
                                  eval::read_predictions(cfg.predictions));
  } else {
    report = eval::run_experiment(manifest, cfg.experiment_config());
  }
  open_out(out / "report.json") << eval::report_json(report);
  open_out(out / "report.md") << eval::report_markdown(report);
  auto pred = open_out(out / "predictions.csv");
  eval::write_predictions_csv(pred, report.predictions);
  if (!report.failures.empty()) {
    log.info(std::to_string(report.failures.size()) + " sample/fold failures recorded in report.json");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "macro-F1 %.4f, ACC %.4f", report.pooled.macro_f1, report.pooled.acc);
  log.info(buf);
}

using Handler = void (*)(const RunConfig&, const fs::path&, const Log&);

struct Command {
  const char* name;
  const char* help;
  Handler run;
};

const Command kCommands[] = {
    {"ingest", "Load sequences, optionally resize, and write raw tensors", cmd_ingest},
    {"dmd", "Exact DMD: eigenvalues, frequencies and optimal amplitudes", cmd_dmd},
    {"dmdsp-sweep", "Sparsity-promoting gamma sweep", cmd_sweep},
    {"tim", "Temporal interpolation to a new frame count", cmd_tim},
    {"sample", "Remove redundant frames (ss, us, us-star, ra, bl)", cmd_sample},
    {"spectrum", "Amplitude-weighted frequency histogram over sequences", cmd_spectrum},
    {"temporal", "Per-frame amplitude profile", cmd_temporal},
    {"gamma-curve", "Preserved percentage and loss versus gamma", cmd_gamma_curve},
    {"lbptop", "Uniform LBPTOP feature extraction", cmd_lbptop},
    {"evaluate", "Cross-validated classification and scoring", cmd_evaluate},
};

std::optional<std::string> prescan_config(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig cfg;
  try {
    if (const auto path = prescan_config(args)) cfg = load_run_config(*path);
  } catch (const Error& e) {
    std::cerr << "modesift: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Frame-sequence dynamics, redundancy removal and evaluation", "modesift"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::size_t> radii(cfg.radii.begin(), cfg.radii.end());

  const std::vector<std::string> strategies{"ss", "us", "us-star", "ra", "bl"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : kCommands) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    subs[c.name] = s;
    s->add_option("--input,-i", cfg.inputs, "Input sequence(s)")->capture_default_str();
    s->add_option("--output,-o", cfg.output, "Output directory");
    s->add_option("--config", config_path, "Run config JSON (flags override it)");
    s->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    s->add_option("--threads", cfg.threads, "Worker threads (MODESIFT_THREADS overrides)");
    s->add_option("--log-level", cfg.log_level, "quiet, error, info or debug")
        ->check(CLI::IsMember({"quiet", "error", "info", "debug"}));
    s->add_option("--rank-tol", cfg.rank_tol, "Relative singular value cutoff")->capture_default_str();
  }
  for (const char* n : {"ingest", "lbptop"}) {
    subs[n]->add_option("--rows", cfg.resize_rows, "Resize to this many rows");
    subs[n]->add_option("--cols", cfg.resize_cols, "Resize to this many columns");
  }
  for (const char* n : {"dmdsp-sweep", "gamma-curve", "sample", "temporal", "evaluate"}) {
    auto* s = subs[n];
    s->add_option("--gamma-min", cfg.gamma_min, "Smallest gamma")->capture_default_str();
    s->add_option("--gamma-max", cfg.gamma_max, "Largest gamma")->capture_default_str();
    s->add_option("--gamma-count", cfg.gamma_count, "Log-spaced grid size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    s->add_option("--rho", cfg.admm.rho, "ADMM penalty")->capture_default_str();
    s->add_option("--max-iter", cfg.admm.max_iter, "ADMM iteration cap")->capture_default_str();
    s->add_option("--zero-tol", cfg.zero_tol, "Amplitude zero threshold")->capture_default_str();
    s->add_option("--gamma-scale", cfg.gamma_scale,
                  "Penalty applied per unit gamma (default 1/255: gamma in 8-bit intensity units)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  for (const char* n : {"sample", "evaluate"}) {
    auto* s = subs[n];
    s->add_option("--strategy", cfg.strategy, "ss, us, us-star, ra or bl")
        ->check(CLI::IsMember(strategies))
        ->capture_default_str();
    s->add_option("--percent", cfg.percent, "Preserved percentage")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    s->add_option("--fixed-length", cfg.fixed_length, "Frame count for us-star")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))
        ->capture_default_str();
    s->add_flag("--keep-original-frames", cfg.keep_original_frames,
                "ss: keep source frames at retained amplitude indices");
  }
  subs["temporal"]
      ->add_option("--percent", cfg.percent, "Preserved percentage")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  subs["temporal"]
      ->add_option("--mapping", cfg.profile_mapping, "sparse_mask or uniform_grid")
      ->check(CLI::IsMember({"sparse_mask", "uniform_grid"}))
      ->capture_default_str();
  subs["tim"]->add_option("--frames", cfg.tim_frames, "Output frame count (default: same)");
  subs["spectrum"]
      ->add_option("--bin-width", cfg.bin_width, "Histogram bin width in Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  for (const char* n : {"lbptop", "evaluate"}) {
    auto* s = subs[n];
    s->add_option("--blocks", cfg.blocks, "Block grid size n_b")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--radii", radii, "RX,RY,RT")->delimiter(',')->expected(3);
    s->add_flag("--normalize,!--no-normalize", cfg.normalize_histograms,
                "L1-normalize each block/plane histogram");
    s->add_option("--manifest", cfg.manifest, "Corpus manifest CSV");
  }
  auto* ev = subs["evaluate"];
  ev->add_option("--rows", cfg.resize_rows, "Resize sampled frames to this many rows");
  ev->add_option("--cols", cfg.resize_cols, "Resize sampled frames to this many columns");
  ev->add_option("--protocol", cfg.protocol, "loso or lovo")
      ->check(CLI::IsMember({"loso", "lovo"}))
      ->capture_default_str();
  ev->add_option("--classifier", cfg.classifier, "reference or import")
      ->check(CLI::IsMember({"reference", "import"}))
      ->capture_default_str();
  ev->add_option("--predictions", cfg.predictions, "CSV sample_id,predicted_label");
  ev->add_option("--c", cfg.svm_c, "Classifier cost c")->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--g", cfg.svm_g, "RBF bandwidth g")->check(CLI::PositiveNumber)->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "modesift: " << e.what() << "\n\n";
    const auto used = app.get_subcommands();
    std::cerr << (used.empty() ? app.help() : used.front()->help());
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  if (const CLI::Option* o = chosen->get_option_no_throw("--radii"); o && o->count() > 0) {
    std::copy(radii.begin(), radii.end(), cfg.radii.begin());
  }
  // Inputs may come from --config, so presence is checked after the merge.
  const bool has_input = cfg.subcommand == "evaluate"   ? !cfg.manifest.empty()
                         : cfg.subcommand == "lbptop" ? !(cfg.inputs.empty() && cfg.manifest.empty())
                                                      : !cfg.inputs.empty();
  if (!has_input) {
    std::cerr << "modesift " << cfg.subcommand << ": "
              << (cfg.subcommand == "evaluate" ? "--manifest" : "--input") << " is required\n\n"
              << chosen->help();
    return kExitUsage;
  }
  cfg.threads = resolve_thread_count(cfg.threads);

  const Log log(cfg.log_level);
  try {
    ScopedThreadCount threads(cfg.threads);
    const fs::path out = prepare_output(cfg);
    save_run_config(cfg, out / "run_config.json");
    for (const auto& c : kCommands) {
      if (cfg.subcommand == c.name) c.run(cfg, out, log);
    }
  } catch (const Error& e) {
    std::cerr << "modesift " << cfg.subcommand << ": " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "modesift " << cfg.subcommand << ": " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace modesift::cli
