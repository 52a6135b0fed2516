#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fstk.hpp"
#include "manifest.hpp"
#include "pgmrf/errors.hpp"
#include "pgmrf/eval.hpp"
#include "pgmrf/observation.hpp"
#include "pgmrf/rng.hpp"
#include "pgmrf/sampler.hpp"

namespace pgmrf::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

class Outputs {
 public:
  Outputs(fs::path dir, std::string prefix, io::RunManifest& manifest)
      : dir_(std::move(dir)), prefix_(std::move(prefix)), manifest_(manifest) {
    fs::create_directories(dir_);
  }
  fs::path path(const std::string& name) const { return dir_ / (prefix_ + name); }
  void write(const std::string& name, const std::string& contents) {
    const fs::path p = path(name);
    io::write_file_atomic(p, contents);
    manifest_.record_output(p);
  }
  void finish(const Clock::time_point start) {
    manifest_.set("timing.total_ms", fmt(elapsed_ms(start), "%.3f"));
    io::write_file_atomic(path("manifest.txt"), manifest_.format());
  }

 private:
  fs::path dir_;
  std::string prefix_;
  io::RunManifest& manifest_;
};

io::RunManifest start_manifest(const std::vector<std::string>& args, const std::string& command) {
  io::RunManifest m;
  m.set("tool", "pgmrf");
  m.set("version", kVersion);
  m.set("command", command);
  m.set("wall_clock_utc", utc_now());
  m.set_arguments(args);
  return m;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scene;
  std::string input;
  std::size_t rows = 256;
  std::size_t cols = 256;
  std::size_t frames = 1;
  std::string model;
  double target_mean = 0.0;
  std::uint64_t seed = 1;
  double mask_fraction = 0.0;
  std::string eta;
  std::string out_dir = ".";
  std::string prefix;
};

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto start = Clock::now();
  io::RunManifest manifest = start_manifest(args, "simulate");
  Outputs outputs(o.out_dir, o.prefix, manifest);

  IntensityStack raw;
  if (!o.input.empty()) {
    raw = io::read_intensity(o.input);
    manifest.record_input("truth", o.input);
  } else {
    raw = make_scene(parse_scene_kind(o.scene), o.rows, o.cols, o.frames, o.seed);
    manifest.set("scene", o.scene);
  }
  const Geometry g = raw.geometry();
  const ModelKind kind = parse_model_kind(o.model);
  ObservationModel model = ObservationModel::uniform(kind, g);
  if (!o.eta.empty()) {
    model.eta = io::read_efficiency(o.eta);
    if (model.eta.rows() != g.rows || model.eta.cols() != g.cols) {
      throw ValidationError("efficiency map size does not match the intensity frames");
    }
    manifest.record_input("eta", o.eta);
  }
  if (o.mask_fraction < 0.0 || o.mask_fraction >= 1.0) {
    throw std::invalid_argument("--mask-fraction must lie in [0, 1)");
  }
  if (o.mask_fraction > 0.0) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      RngStream rng(o.seed, 0, k, StreamTag::Mask);
      if (rng.uniform() < o.mask_fraction) model.mask.set(g.index(k), false);
    }
  }
  manifest.set("model", o.model);
  manifest.set("target_mean", fmt(o.target_mean, "%.17g"));
  manifest.set("seed", std::to_string(o.seed));
  manifest.set("rows", std::to_string(g.rows));
  manifest.set("cols", std::to_string(g.cols));
  manifest.set("frames", std::to_string(g.frames));

  const auto t0 = Clock::now();
  const IntensityStack truth = scale_to_target(raw, o.target_mean);
  const CountStack y = simulate(model, truth, o.seed);
  manifest.set("timing.simulate_ms", fmt(elapsed_ms(t0), "%.3f"));

  outputs.write("truth.fstk", io::format_fstk(truth));
  outputs.write("obs.fstk", io::format_fstk(y, kind == ModelKind::Bernoulli ? io::Dtype::U1
                                                                            : io::Dtype::U32));
  outputs.write("mask.fstk", io::format_fstk(model.mask));
  if (!o.eta.empty()) outputs.write("eta.fstk", io::read_file(o.eta));
  outputs.finish(start);

  double mean = 0.0;
  for (auto v : y.data()) mean += v;
  out << "wrote " << outputs.path("obs.fstk").string() << " (mean count "
      << fmt(mean / static_cast<double>(y.size()), "%.4f") << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// denoise

struct DenoiseOptions {
  std::string obs;
  std::string model;
  std::string temporal = "off";
  std::size_t iters = 2000;
  std::size_t burnin = 600;
  std::size_t thinning = 1;
  double alpha = 4.0;
  double beta = 4.0;
  std::string adapt = "off";
  std::string mask;
  std::string eta;
  std::uint64_t seed = 1;
  double support_max = std::numeric_limits<double>::infinity();
  bool uncorrected_spatial_scale = false;
  int threads = 1;
  std::string time_boundary = "fixed";
  bool per_frame_alpha = false;
  bool quantiles = false;
  std::string out_dir = ".";
  std::string prefix;
};

int cmd_denoise(const DenoiseOptions& o, const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  const auto start = Clock::now();
  io::RunManifest manifest = start_manifest(args, "denoise");

  SamplerConfig config;
  config.model = parse_model_kind(o.model);
  if (o.temporal != "on" && o.temporal != "off") throw std::invalid_argument("--temporal must be on|off");
  config.temporal = o.temporal == "on";
  config.n_mc = o.iters;
  config.n_bi = o.burnin;
  config.thinning = o.thinning;
  config.alpha0 = o.alpha;
  config.beta0 = o.beta;
  config.adapt = parse_adaptation(o.adapt);
  config.seed = o.seed;
  config.support.hi = o.support_max;
  config.uncorrected_spatial_scale = o.uncorrected_spatial_scale;
  config.threads = o.threads;
  if (o.time_boundary != "fixed" && o.time_boundary != "cyclic") {
    throw std::invalid_argument("--time-boundary must be fixed|cyclic");
  }
  config.time_boundary = o.time_boundary == "cyclic" ? TimeBoundary::Cyclic : TimeBoundary::Fixed;
  config.per_frame_alpha = o.per_frame_alpha;
  config.keep_quantiles = o.quantiles;
  config.validate();

  const CountStack y = io::read_counts(o.obs);
  manifest.record_input("obs", o.obs);
  const Geometry& g = y.geometry();
  validate_observations(config.model, y);
  ObservationModel model = ObservationModel::uniform(config.model, g);
  if (!o.mask.empty()) {
    model.mask = io::read_mask(o.mask);
    require_same_shape(g, model.mask.geometry(), "--mask");
    manifest.record_input("mask", o.mask);
    if (model.mask.invalid_fraction() > 0.1) {
      err << "warning: " << fmt(100.0 * model.mask.invalid_fraction(), "%.1f")
          << "% of sites are masked; the prior is meant for sparse faults\n";
    }
  }
  if (!o.eta.empty()) {
    model.eta = io::read_efficiency(o.eta);
    if (model.eta.rows() != g.rows || model.eta.cols() != g.cols) {
      throw ValidationError("efficiency map size does not match the observation frames");
    }
    manifest.record_input("eta", o.eta);
  }

  manifest.set("model", o.model);
  manifest.set("temporal", o.temporal);
  manifest.set("iters", std::to_string(config.n_mc));
  manifest.set("burnin", std::to_string(config.n_bi));
  manifest.set("thinning", std::to_string(config.thinning));
  manifest.set("alpha0", fmt(config.alpha0, "%.17g"));
  manifest.set("beta0", fmt(config.beta0, "%.17g"));
  manifest.set("adapt", to_string(config.adapt));
  manifest.set("seed", std::to_string(config.seed));
  manifest.set("support_max", fmt(config.support.hi, "%.17g"));
  manifest.set("uncorrected_spatial_scale", config.uncorrected_spatial_scale ? "1" : "0");
  manifest.set("time_boundary", o.time_boundary);
  manifest.set("per_frame_alpha", config.per_frame_alpha ? "1" : "0");
  manifest.set("threads", std::to_string(config.threads));

  const auto t0 = Clock::now();
  const ChainSummary summary = run_chain(y, model, config);
  manifest.set("timing.chain_ms", fmt(elapsed_ms(t0), "%.3f"));
  manifest.set("kept", std::to_string(summary.kept));
  for (const auto& w : summary.warnings) err << "warning: " << w << "\n";

  Outputs outputs(o.out_dir, o.prefix, manifest);
  outputs.write("x_mmse.fstk", io::format_fstk(summary.x_mmse));
  outputs.write("x_var.fstk", io::format_fstk(summary.x_var));
  outputs.write("accept.fstk", io::format_fstk(summary.accept_rate));
  if (summary.x_quantiles) {
    outputs.write("x_q05.fstk", io::format_fstk((*summary.x_quantiles)[0]));
    outputs.write("x_q50.fstk", io::format_fstk((*summary.x_quantiles)[1]));
    outputs.write("x_q95.fstk", io::format_fstk((*summary.x_quantiles)[2]));
  }
  std::string trace = "iteration";
  const std::size_t n_alpha = config.per_frame_alpha ? g.frames : 1;
  for (std::size_t t = 0; t < n_alpha; ++t) {
    trace += n_alpha == 1 ? ",alpha" : ",alpha_" + std::to_string(t);
  }
  trace += ",beta\n";
  for (const auto& h : summary.hyper_trace) {
    trace += std::to_string(h.iteration);
    for (std::size_t t = 0; t < n_alpha; ++t) trace += "," + fmt(h.alpha[t], "%.17g");
    trace += "," + fmt(h.beta, "%.17g") + "\n";
  }
  outputs.write("hyper.csv", trace);
  outputs.finish(start);

  const double rate = summary.mean_accept_rate_detected(y, model.mask);
  out << "kept " << summary.kept << " samples";
  if (config.model == ModelKind::Bernoulli && !std::isnan(rate)) {
    out << ", mean acceptance at detections " << fmt(rate, "%.3f");
  }
  out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string truth;
  std::string estimate;
  std::string obs;
  std::string out;
};

std::string metrics_csv(const std::vector<FrameMetrics>& rows) {
  std::string csv = "frame,nmse,nse_std,detection_rate\n";
  double sn = 0.0, ss = 0.0, sd = 0.0;
  for (const auto& r : rows) {
    csv += std::to_string(r.frame) + "," + fmt(r.nmse) + "," + fmt(r.nse_std) + "," +
           (std::isnan(r.detection_rate) ? std::string() : fmt(r.detection_rate)) + "\n";
    sn += r.nmse;
    ss += r.nse_std;
    sd += r.detection_rate;
  }
  const double n = static_cast<double>(rows.size());
  csv += "all," + fmt(sn / n) + "," + fmt(ss / n) + "," +
         (std::isnan(sd) ? std::string() : fmt(sd / n)) + "\n";
  return csv;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const IntensityStack truth = io::read_intensity(o.truth);
  const IntensityStack estimate = io::read_intensity(o.estimate);
  require_same_shape(truth.geometry(), estimate.geometry(), "evaluate");
  const auto rows = o.obs.empty() ? frame_metrics(truth, estimate)
                                  : frame_metrics(truth, estimate, io::read_counts(o.obs));
  const std::string csv = metrics_csv(rows);
  if (o.out.empty()) {
    out << csv;
  } else {
    io::write_file_atomic(o.out, csv);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// integrate

struct IntegrateOptions {
  std::string obs;
  std::size_t group_size = 1;
  std::string out;
};

int cmd_integrate(const IntegrateOptions& o, std::ostream& out, std::ostream& err) {
  const CountStack y = io::read_counts(o.obs);
  const IntegrationResult r = integrate_and_threshold(y, o.group_size);
  if (r.dropped > 0) {
    err << "warning: dropped " << r.dropped << " trailing frame(s) that do not fill a group of "
        << o.group_size << "\n";
  }
  io::write_file_atomic(o.out, io::format_fstk(r.frames, io::Dtype::U1));
  out << "wrote " << r.frames.frames() << " frame(s) to " << o.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep: simulate + denoise + evaluate over the target-mean grid

struct SweepOptions {
  std::string scene = "piecewise";
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t reps = 20;
  std::size_t iters = 2000;
  std::size_t burnin = 600;
  double alpha = 4.0;
  std::string adapt = "off";
  std::uint64_t seed = 1;
  std::vector<double> targets{kTargetMeanGrid.begin(), kTargetMeanGrid.end()};
  int threads = 1;
  std::string out;
};

struct RunningStats {
  double sum = 0.0, sum2 = 0.0, nse = 0.0;
  std::size_t n = 0;
  void add(double v, double s) {
    sum += v;
    sum2 += v * v;
    nse += s;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double sd() const {
    const double m = mean();
    return n > 1 ? std::sqrt(std::max(0.0, (sum2 - n * m * m) / static_cast<double>(n - 1))) : 0.0;
  }
  double nse_mean() const { return nse / static_cast<double>(n); }
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const IntensityStack raw = make_scene(parse_scene_kind(o.scene), o.rows, o.cols, 1, o.seed);
  const Geometry& g = raw.geometry();
  std::string csv =
      "target_mean,reps,det_poisson,det_bernoulli,"
      "nmse_pid_poisson,nmse_sd_pid_poisson,nse_std_pid_poisson,"
      "nmse_bid_bernoulli,nmse_sd_bid_bernoulli,nse_std_bid_bernoulli,"
      "nmse_pid_bernoulli,nmse_sd_pid_bernoulli,nse_std_pid_bernoulli\n";
  for (std::size_t ti = 0; ti < o.targets.size(); ++ti) {
    const IntensityStack truth = scale_to_target(raw, o.targets[ti]);
    RunningStats pid_p, bid_b, pid_b;
    double det_p = 0.0, det_b = 0.0;
    for (std::size_t r = 0; r < o.reps; ++r) {
      const std::uint64_t s = o.seed * 1000003ull + ti * 1009ull + r;
      const auto poisson = ObservationModel::uniform(ModelKind::Poisson, g);
      const auto bernoulli = ObservationModel::uniform(ModelKind::Bernoulli, g);
      const CountStack yp = simulate(poisson, truth, s);
      const CountStack yb = simulate(bernoulli, truth, s);
      for (auto v : yp.data()) det_p += v;
      for (auto v : yb.data()) det_b += v;
      SamplerConfig c;
      c.n_mc = o.iters;
      c.n_bi = o.burnin;
      c.alpha0 = o.alpha;
      c.adapt = parse_adaptation(o.adapt);
      c.seed = s;
      c.threads = o.threads;
      c.model = ModelKind::Poisson;
      auto est = run_chain(yp, poisson, c).x_mmse;
      pid_p.add(nmse(truth, est, 0), nse_std(truth, est, 0));
      est = run_chain(yb, poisson, c).x_mmse;
      pid_b.add(nmse(truth, est, 0), nse_std(truth, est, 0));
      c.model = ModelKind::Bernoulli;
      est = run_chain(yb, bernoulli, c).x_mmse;
      bid_b.add(nmse(truth, est, 0), nse_std(truth, est, 0));
    }
    const double denom = static_cast<double>(o.reps * g.size());
    csv += fmt(o.targets[ti]) + "," + std::to_string(o.reps) + "," + fmt(det_p / denom, "%.4f") +
           "," + fmt(det_b / denom, "%.4f");
    for (const RunningStats* st : {&pid_p, &bid_b, &pid_b}) {
      csv += "," + fmt(st->mean(), "%.6f") + "," + fmt(st->sd(), "%.6f") + "," +
             fmt(st->nse_mean(), "%.6f");
    }
    csv += "\n";
  }
  if (o.out.empty()) {
    out << csv;
  } else {
    io::write_file_atomic(o.out, csv);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const auto manifest = io::RunManifest::parse(io::read_file(manifest_path));
  const auto args = manifest.arguments();
  if (args.size() < 2) throw ValidationError("manifest records no command line");
  if (args[1] == "replay") throw ValidationError("refusing to replay a replay");
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-limited image restoration with a hidden gamma-MRF prior", "pgmrf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Scale an intensity field and corrupt it");
  auto* scene_opt = simulate_cmd->add_option("--scene", sim.scene, "Synthetic scene")
                        ->check(CLI::IsMember({"piecewise", "smooth", "moving"}));
  auto* input_opt = simulate_cmd->add_option("--input", sim.input, "Intensity FSTK file");
  scene_opt->excludes(input_opt);
  simulate_cmd->add_option("--rows", sim.rows)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--cols", sim.cols)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--frames", sim.frames)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--model", sim.model)->required()->check(CLI::IsMember({"poisson", "bernoulli"}));
  simulate_cmd->add_option("--target-mean", sim.target_mean, "Mean intensity after scaling")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed);
  simulate_cmd->add_option("--mask-fraction", sim.mask_fraction, "Fraction of faulty sites");
  simulate_cmd->add_option("--eta", sim.eta, "Efficiency map FSTK (f64, one frame)");
  simulate_cmd->add_option("--out-dir", sim.out_dir);
  simulate_cmd->add_option("--prefix", sim.prefix);

  DenoiseOptions den;
  auto* denoise_cmd = app.add_subcommand("denoise", "Run the Gibbs / Metropolis-within-Gibbs sampler");
  denoise_cmd->add_option("obs,--obs", den.obs, "Observation FSTK file")->required();
  denoise_cmd->add_option("--model", den.model)->required()->check(CLI::IsMember({"poisson", "bernoulli"}));
  denoise_cmd->add_option("--temporal", den.temporal)->check(CLI::IsMember({"on", "off"}));
  denoise_cmd->add_option("--iters", den.iters);
  denoise_cmd->add_option("--burnin", den.burnin);
  denoise_cmd->add_option("--thinning", den.thinning);
  denoise_cmd->add_option("--alpha", den.alpha);
  denoise_cmd->add_option("--beta", den.beta);
  denoise_cmd->add_option("--adapt", den.adapt)->check(CLI::IsMember({"off", "alpha", "alpha-beta"}));
  denoise_cmd->add_option("--mask", den.mask);
  denoise_cmd->add_option("--eta", den.eta);
  denoise_cmd->add_option("--seed", den.seed);
  denoise_cmd->add_option("--support-max", den.support_max);
  denoise_cmd->add_flag("--uncorrected-spatial-scale", den.uncorrected_spatial_scale,
                        "Use x_bar/(1 + x_bar eta) as the spatial Poisson posterior scale");
  denoise_cmd->add_option("--threads", den.threads)->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--time-boundary", den.time_boundary)->check(CLI::IsMember({"fixed", "cyclic"}));
  denoise_cmd->add_flag("--per-frame-alpha", den.per_frame_alpha);
  denoise_cmd->add_flag("--quantiles", den.quantiles, "Also write 5/50/95% quantile stacks");
  denoise_cmd->add_option("--out-dir", den.out_dir);
  denoise_cmd->add_option("--prefix", den.prefix);

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-frame NMSE table");
  evaluate_cmd->add_option("--truth", ev.truth)->required();
  evaluate_cmd->add_option("--estimate", ev.estimate)->required();
  evaluate_cmd->add_option("--obs", ev.obs, "Observations, for the detection-rate column");
  evaluate_cmd->add_option("--out", ev.out);

  IntegrateOptions in;
  auto* integrate_cmd = app.add_subcommand("integrate", "Sum frame groups and threshold");
  integrate_cmd->add_option("obs,--obs", in.obs)->required();
  integrate_cmd->add_option("--group-size", in.group_size)->required();
  integrate_cmd->add_option("--out", in.out)->required();

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "NMSE of both models over the target-mean grid");
  sweep_cmd->add_option("--scene", sw.scene)->check(CLI::IsMember({"piecewise", "smooth"}));
  sweep_cmd->add_option("--rows", sw.rows)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--cols", sw.cols)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--reps", sw.reps)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--iters", sw.iters);
  sweep_cmd->add_option("--burnin", sw.burnin);
  sweep_cmd->add_option("--alpha", sw.alpha);
  sweep_cmd->add_option("--adapt", sw.adapt)->check(CLI::IsMember({"off", "alpha"}));
  sweep_cmd->add_option("--seed", sw.seed);
  sweep_cmd->add_option("--targets", sw.targets)->delimiter(',');
  sweep_cmd->add_option("--threads", sw.threads)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sw.out);

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path)->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  if (simulate_cmd->parsed()) {
    if (sim.scene.empty() == sim.input.empty()) {
      err << "error: exactly one of --scene or --input is required\n\n" << simulate_cmd->help();
      return kUsage;
    }
    return cmd_simulate(sim, args, out);
  }
  if (denoise_cmd->parsed()) return cmd_denoise(den, args, out, err);
  if (evaluate_cmd->parsed()) return cmd_evaluate(ev, out);
  if (integrate_cmd->parsed()) return cmd_integrate(in, out, err);
  if (sweep_cmd->parsed()) return cmd_sweep(sw, out);
  return cmd_replay(manifest_path, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ValidationError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kDataValidation;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pgmrf::cli
