#include "modesift/run_config.hpp"

#include "modesift/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace modesift {

namespace {

using nlohmann::ordered_json;

template <typename T>
void get_opt(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return to_json(a) == to_json(b);
}

sampling::SamplingConfig RunConfig::sampling_config() const {
  sampling::SamplingConfig s;
  s.strategy = sampling::strategy_from_string(strategy);
  s.percent = percent;
  s.fixed_length = fixed_length;
  s.seed = seed;
  s.gamma_grid = gamma_grid();
  s.sweep = sweep_options();
  s.rank_tol = rank_tol;
  s.keep_original_frames = keep_original_frames;
  return s;
}

features::LbptopConfig RunConfig::lbptop_config() const {
  features::LbptopConfig c;
  c.blocks = blocks;
  c.radii = radii;
  c.normalize = normalize_histograms;
  return c;
}

eval::ExperimentConfig RunConfig::experiment_config() const {
  eval::ExperimentConfig e;
  e.sampling = sampling_config();
  e.lbp = lbptop_config();
  e.protocol = eval::protocol_from_string(protocol);
  e.resize_rows = resize_rows;
  e.resize_cols = resize_cols;
  e.classifier = {svm_c, svm_g};
  e.threads = threads;
  return e;
}

dmdsp::SweepOptions RunConfig::sweep_options() const {
  dmdsp::SweepOptions o;
  o.admm = admm;
  o.zero_tol = zero_tol;
  o.gamma_scale = gamma_scale;
  return o;
}

std::vector<double> RunConfig::gamma_grid() const {
  return dmdsp::log_grid(gamma_min, gamma_max, gamma_count);
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["inputs"] = c.inputs;
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["log_level"] = c.log_level;
  j["sampling"] = {{"strategy", c.strategy},
                   {"percent", c.percent},
                   {"fixed_length", c.fixed_length},
                   {"keep_original_frames", c.keep_original_frames},
                   {"rank_tol", c.rank_tol}};
  j["dmdsp"] = {{"gamma_min", c.gamma_min},
                {"gamma_max", c.gamma_max},
                {"gamma_count", c.gamma_count},
                {"zero_tol", c.zero_tol},
                {"gamma_scale", c.gamma_scale},
                {"rho", c.admm.rho},
                {"max_iter", c.admm.max_iter},
                {"eps_abs", c.admm.eps_abs},
                {"eps_rel", c.admm.eps_rel}};
  j["tim"] = {{"frames", c.tim_frames}};
  j["analysis"] = {{"bin_width", c.bin_width}, {"profile_mapping", c.profile_mapping}};
  j["lbptop"] = {{"blocks", c.blocks},
                 {"radii", c.radii},
                 {"normalize", c.normalize_histograms},
                 {"resize_rows", c.resize_rows},
                 {"resize_cols", c.resize_cols}};
  j["evaluate"] = {{"manifest", c.manifest},       {"protocol", c.protocol},
                   {"classifier", c.classifier},   {"predictions", c.predictions},
                   {"c", c.svm_c},                 {"g", c.svm_g}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  RunConfig c;
  try {
    const ordered_json j = ordered_json::parse(text);
    get_opt(j, "subcommand", c.subcommand);
    get_opt(j, "inputs", c.inputs);
    get_opt(j, "output", c.output);
    get_opt(j, "seed", c.seed);
    get_opt(j, "threads", c.threads);
    get_opt(j, "log_level", c.log_level);
    if (j.contains("sampling")) {
      const auto& s = j["sampling"];
      get_opt(s, "strategy", c.strategy);
      get_opt(s, "percent", c.percent);
      get_opt(s, "fixed_length", c.fixed_length);
      get_opt(s, "keep_original_frames", c.keep_original_frames);
      get_opt(s, "rank_tol", c.rank_tol);
    }
    if (j.contains("dmdsp")) {
      const auto& d = j["dmdsp"];
      get_opt(d, "gamma_min", c.gamma_min);
      get_opt(d, "gamma_max", c.gamma_max);
      get_opt(d, "gamma_count", c.gamma_count);
      get_opt(d, "zero_tol", c.zero_tol);
      get_opt(d, "gamma_scale", c.gamma_scale);
      get_opt(d, "rho", c.admm.rho);
      get_opt(d, "max_iter", c.admm.max_iter);
      get_opt(d, "eps_abs", c.admm.eps_abs);
      get_opt(d, "eps_rel", c.admm.eps_rel);
    }
    if (j.contains("tim")) get_opt(j["tim"], "frames", c.tim_frames);
    if (j.contains("analysis")) {
      get_opt(j["analysis"], "bin_width", c.bin_width);
      get_opt(j["analysis"], "profile_mapping", c.profile_mapping);
    }
    if (j.contains("lbptop")) {
      const auto& l = j["lbptop"];
      get_opt(l, "blocks", c.blocks);
      get_opt(l, "radii", c.radii);
      get_opt(l, "normalize", c.normalize_histograms);
      get_opt(l, "resize_rows", c.resize_rows);
      get_opt(l, "resize_cols", c.resize_cols);
    }
    if (j.contains("evaluate")) {
      const auto& e = j["evaluate"];
      get_opt(e, "manifest", c.manifest);
      get_opt(e, "protocol", c.protocol);
      get_opt(e, "classifier", c.classifier);
      get_opt(e, "predictions", c.predictions);
      get_opt(e, "c", c.svm_c);
      get_opt(e, "g", c.svm_g);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

void save_run_config(const RunConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json(c);
}

}  // namespace modesift
