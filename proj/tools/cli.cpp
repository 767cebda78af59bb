#include "cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <streambuf>

#include "breath/corpus.hpp"
#include "breath/error.hpp"
#include "breath/model_io.hpp"
#include "breath/monitor.hpp"
#include "breath/run_config.hpp"
#include "breath/simulate.hpp"
#include "breath/synthgen.hpp"

namespace breath::cli {
namespace {

struct UsageError : std::runtime_error {
  UsageError(const std::string& message, const CLI::App* app) : std::runtime_error(message), app(app) {}
  const CLI::App* app;
};

// Options every subcommand accepts.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value configuration file");
    app->add_option("--seed", seed, "master seed (overrides config and " + std::string(kSeedEnvVar) + ")");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    apply_environment(c);
    if (seed) c.seed = *seed;
    return c;
  }
};

struct ScenarioOptions {
  std::string kind = "normal";
  ScenarioSpec spec;

  void attach(CLI::App* app, const char* kind_flag) {
    app->add_option(kind_flag, kind, "normal | arrest | decrement")->capture_default_str();
    app->add_option("--duration", spec.duration, "seconds")->capture_default_str();
    app->add_option("--period", spec.base_period, "base breath period, seconds")->capture_default_str();
    app->add_option("--jitter", spec.jitter_sd, "period jitter sd, seconds")->capture_default_str();
    app->add_option("--onset", spec.onset, "arrest/decrement onset, seconds")->capture_default_str();
    app->add_option("--rate", spec.decrement_rate, "period growth per breath after onset")->capture_default_str();
    app->add_option("--noise-floor", spec.noise_floor, "ambient noise amplitude")->capture_default_str();
  }

  ScenarioSpec resolve(std::uint64_t seed, const CLI::App* app) const {
    ScenarioSpec s = spec;
    const auto k = parse_scenario_kind(kind);
    if (!k) throw UsageError("unknown scenario kind '" + kind + "'", app);
    s.kind = *k;
    s.seed = seed;
    try {
      s.validate();
    } catch (const Error& e) {
      throw UsageError(e.detail(), app);
    }
    return s;
  }
};

std::string require_path(const std::string& flag, const std::string& from_config, const std::string& key,
                         const CLI::App* app) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw UsageError("missing " + key + " (pass the flag or set it in --config)", app);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(9) << v;
  return s.str();
}

Corpus open_corpus(const std::string& path, std::ostream& err) {
  CorpusLoad load = load_corpus(path);
  for (const LoadIssue& issue : load.errors) err << "warning: skipped " << issue.path.string() << ": " << issue.message << '\n';
  return std::move(load.corpus);
}

std::uint64_t model_seed(const ModelBundle& bundle, std::uint64_t fallback) {
  const auto it = bundle.metadata.find("seed");
  if (it == bundle.metadata.end()) return fallback;
  return std::stoull(it->second);
}

// Replays already-consumed bytes before the rest of a stream, so stdin can be
// sniffed for a RIFF header without seeking.
class PrefixedBuffer : public std::streambuf {
 public:
  PrefixedBuffer(std::string prefix, std::streambuf* rest) : prefix_(std::move(prefix)), rest_(rest) {
    setg(prefix_.data(), prefix_.data(), prefix_.data() + prefix_.size());
  }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const std::streamsize n = rest_->sgetn(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (n <= 0) return traits_type::eof();
    setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  std::string prefix_;
  std::streambuf* rest_;
  std::array<char, 8192> buffer_{};
};

int cmd_synth_corpus(const Common& common, const std::string& out_dir, std::size_t per_class, std::ostream& out) {
  const RunConfig config = common.resolve();
  const Corpus corpus = gen_corpus(per_class, config.seed, out_dir);
  out << "clips," << corpus.size() << '\n';
  out << "fingerprint," << hex64(corpus_fingerprint(corpus)) << '\n';
  return kExitOk;
}

int cmd_synth_scenario(const Common& common, const ScenarioOptions& opts, const std::string& prefix,
                       const CLI::App* app, std::ostream& out) {
  const RunConfig config = common.resolve();
  const Scenario sc = gen_scenario(opts.resolve(config.seed, app));
  save_wav(prefix + ".wav", sc.audio);
  save_ground_truth(prefix + ".csv", sc.truth);
  out << "samples," << sc.audio.samples.size() << '\n';
  out << "onsets," << sc.truth.onsets.size() << '\n';
  return kExitOk;
}

int cmd_train_ae(const Common& common, const std::string& corpus_flag, const std::string& out_flag,
                 std::optional<std::size_t> epochs, std::optional<std::size_t> frames, const CLI::App* app,
                 std::ostream& out, std::ostream& err) {
  RunConfig config = common.resolve();
  if (epochs) config.ae_epochs = *epochs;
  if (frames) config.ae_frames = *frames;
  const std::string corpus_path = require_path(corpus_flag, config.corpus_path, "corpus path", app);
  const std::string model_path = require_path(out_flag, config.model_path, "model path", app);

  const Corpus corpus = open_corpus(corpus_path, err);
  const SplitPlan plan = make_split(corpus, config.seed);
  std::vector<SpectralFrame> frames_seen;
  for (std::size_t id : plan.pool()) {
    const auto f = spectral_frames(corpus.clips[id].clip);
    frames_seen.insert(frames_seen.end(), f.begin(), f.end());
  }
  const AETrainResult result = train_ae(to_matrix(frames_seen), config.ae_config());

  ModelBundle bundle{result.params, init_rnn(config.seed, config.rnn_hidden), {}};
  bundle.metadata["seed"] = std::to_string(config.seed);
  bundle.metadata["ae.epochs"] = std::to_string(config.ae_epochs);
  bundle.metadata["ae.frames"] = std::to_string(config.ae_frames);
  bundle.metadata["corpus.fingerprint"] = hex64(corpus_fingerprint(corpus));
  bundle.metadata["stage"] = "ae";
  if (!result.loss_trace.empty()) bundle.metadata["ae.final_loss"] = num(result.loss_trace.back());
  save_model(bundle, model_path);

  out << "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) out << e << ',' << num(result.loss_trace[e]) << '\n';
  return kExitOk;
}

int cmd_train_rnn(const Common& common, const std::string& corpus_flag, const std::string& model_flag,
                  const std::string& out_flag, std::optional<std::size_t> epochs, const CLI::App* app,
                  std::ostream& out, std::ostream& err) {
  RunConfig config = common.resolve();
  if (epochs) config.rnn_epochs = *epochs;
  const std::string corpus_path = require_path(corpus_flag, config.corpus_path, "corpus path", app);
  const std::string model_path = require_path(model_flag, config.model_path, "model path", app);
  const std::string out_path = out_flag.empty() ? model_path : out_flag;

  ModelBundle bundle = load_model(model_path);
  const Corpus corpus = open_corpus(corpus_path, err);
  const std::uint64_t seed = common.seed ? config.seed : model_seed(bundle, config.seed);
  RNNTrainConfig rc = config.rnn_config();
  rc.seed = seed;
  const SplitPlan plan = make_split(corpus, seed);
  const RNNTrainResult result = train_rnn(corpus, plan, bundle.ae, rc);

  bundle.rnn = result.params;
  bundle.metadata["seed"] = std::to_string(seed);
  bundle.metadata["rnn.epochs"] = std::to_string(config.rnn_epochs);
  bundle.metadata["rnn.hidden"] = std::to_string(config.rnn_hidden);
  bundle.metadata["corpus.fingerprint"] = hex64(corpus_fingerprint(corpus));
  bundle.metadata["stage"] = "rnn";
  save_model(bundle, out_path);

  out << "epoch,train_loss,validation_accuracy\n";
  for (const EpochMetrics& m : result.trace) {
    out << m.epoch << ',' << num(m.train_loss) << ',' << num(m.validation_accuracy) << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Common& common, const std::string& corpus_flag, const std::string& model_flag,
             const CLI::App* app, std::ostream& out, std::ostream& err) {
  const RunConfig config = common.resolve();
  const std::string model_path = require_path(model_flag, config.model_path, "model path", app);
  const std::string corpus_path = require_path(corpus_flag, config.corpus_path, "corpus path", app);

  const ModelBundle bundle = load_model(model_path);
  const Corpus corpus = open_corpus(corpus_path, err);
  const std::uint64_t seed = common.seed ? config.seed : model_seed(bundle, config.seed);
  const SplitPlan plan = make_split(corpus, seed);
  std::vector<AudioClip> test;
  for (std::size_t id : plan.test_ids()) test.push_back(corpus.clips[id].clip);
  const EvalReport r = evaluate(bundle.rnn, bundle.ae, test);

  out << std::fixed << std::setprecision(4);
  out << "clips," << r.count << '\n';
  out << "accuracy," << r.accuracy << '\n';
  out << "macro_f1," << r.macro_f1 << '\n';
  for (Label l : kAllLabels) out << "f1_" << to_string(l) << ',' << r.f1[index_of(l)] << '\n';
  out << "confusion,truth\\pred";
  for (Label l : kAllLabels) out << ',' << to_string(l);
  out << '\n';
  for (Label t : kAllLabels) {
    out << "confusion," << to_string(t);
    for (Label p : kAllLabels) out << ',' << r.confusion[index_of(t)][index_of(p)];
    out << '\n';
  }
  return kExitOk;
}

void stream_monitor(const ModelBundle& bundle, FrameSource& source, const MonitorConfig& config, std::ostream& out) {
  Monitor monitor(bundle.ae, bundle.rnn, config);
  out << std::fixed << std::setprecision(3);
  while (auto frame = source.next()) {
    const Monitor::Step step = monitor.push(*frame);
    if (step.event) out << step.event->time << ',' << to_string(step.event->kind) << '\n';
    for (const Alert& a : step.alerts) {
      out << a.time << ',' << to_string(a.kind) << ',' << a.statistic << ',' << a.threshold << '\n';
    }
    if (step.event || !step.alerts.empty()) out.flush();
  }
}

int cmd_monitor(const Common& common, const std::string& model_flag, const std::string& wav_path,
                const CLI::App* app, std::istream& in, std::ostream& out) {
  const RunConfig config = common.resolve();
  const std::string model_path = require_path(model_flag, config.model_path, "model path", app);
  const ModelBundle bundle = load_model(model_path);

  if (!wav_path.empty()) {
    std::ifstream file(wav_path, std::ios::binary);
    if (!file) throw Error(Errc::io_error, "cannot open " + wav_path);
    const std::size_t samples = read_wav_header(file);
    PcmFrameSource source(file, samples);
    stream_monitor(bundle, source, config.monitor_config(), out);
    return kExitOk;
  }

  std::string head(4, '\0');
  in.read(head.data(), 4);
  head.resize(static_cast<std::size_t>(in.gcount()));
  PrefixedBuffer buffer(head, in.rdbuf());
  std::istream replay(&buffer);
  if (head == "RIFF") {
    const std::size_t samples = read_wav_header(replay);
    PcmFrameSource source(replay, samples);
    stream_monitor(bundle, source, config.monitor_config(), out);
  } else {
    PcmFrameSource source(replay);
    stream_monitor(bundle, source, config.monitor_config(), out);
  }
  return kExitOk;
}

int cmd_simulate(const Common& common, const ScenarioOptions& opts, const std::string& model_flag,
                 const std::string& report_path, const CLI::App* app, std::ostream& out) {
  const RunConfig config = common.resolve();
  const std::string model_path = require_path(model_flag, config.model_path, "model path", app);
  const ScenarioSpec spec = opts.resolve(config.seed, app);
  const ModelBundle bundle = load_model(model_path);
  const SimulationReport report = simulate(bundle.ae, bundle.rnn, spec, config.monitor_config(), config.match_tolerance);

  write_report(out, report);
  if (!report_path.empty()) {
    std::ofstream file(report_path, std::ios::trunc);
    if (!file) throw Error(Errc::io_error, "cannot write " + report_path);
    write_report(file, report);
  }
  return report.alerts.empty() ? kExitOk : kExitAlert;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Acoustic breath monitoring: training, streaming detection and alarm simulation", "breathsentinel"};
  app.require_subcommand(1);

  Common common;
  std::string corpus_path, model_path, out_path, wav_path, report_path;
  std::size_t per_class = 150;
  std::optional<std::size_t> epochs, frames;
  ScenarioOptions scenario;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus or scenario");
  synth->require_subcommand(1);
  auto* synth_corpus_cmd = synth->add_subcommand("corpus", "Write <out>/{inhale,exhale,unknown}/*.wav");
  common.attach(synth_corpus_cmd);
  synth_corpus_cmd->add_option("--out", out_path, "output directory")->required();
  synth_corpus_cmd->add_option("--per-class", per_class, "clips per class")->capture_default_str();
  auto* synth_scenario_cmd = synth->add_subcommand("scenario", "Write <out>.wav and <out>.csv ground truth");
  common.attach(synth_scenario_cmd);
  synth_scenario_cmd->add_option("--out", out_path, "output path prefix")->required();
  scenario.attach(synth_scenario_cmd, "--kind");

  auto* train_ae_cmd = app.add_subcommand("train-ae", "Train the spectral autoencoder");
  common.attach(train_ae_cmd);
  train_ae_cmd->add_option("--corpus", corpus_path, "corpus directory");
  train_ae_cmd->add_option("--out", out_path, "model file to write");
  train_ae_cmd->add_option("--epochs", epochs, "training epochs");
  train_ae_cmd->add_option("--frames", frames, "frames sampled for training (0 = all)");

  auto* train_rnn_cmd = app.add_subcommand("train-rnn", "Train the classifier on top of a trained autoencoder");
  common.attach(train_rnn_cmd);
  train_rnn_cmd->add_option("--corpus", corpus_path, "corpus directory");
  train_rnn_cmd->add_option("--model", model_path, "model file holding the autoencoder");
  train_rnn_cmd->add_option("--out", out_path, "model file to write (default: --model)");
  train_rnn_cmd->add_option("--epochs", epochs, "training epochs");

  auto* eval_cmd = app.add_subcommand("eval", "Score the model on the held-out test split");
  common.attach(eval_cmd);
  eval_cmd->add_option("--corpus", corpus_path, "corpus directory");
  eval_cmd->add_option("--model", model_path, "model file");

  auto* monitor_cmd = app.add_subcommand("monitor", "Stream audio and print events and alerts");
  common.attach(monitor_cmd);
  monitor_cmd->add_option("--model", model_path, "model file");
  monitor_cmd->add_option("--wav", wav_path, "WAV file (default: WAV or raw s16le PCM on stdin)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Run a synthetic scenario and report detection latency");
  common.attach(simulate_cmd);
  simulate_cmd->add_option("--model", model_path, "model file");
  simulate_cmd->add_option("--report", report_path, "also write the report here");
  scenario.attach(simulate_cmd, "--scenario");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (synth_corpus_cmd->parsed()) return cmd_synth_corpus(common, out_path, per_class, out);
    if (synth_scenario_cmd->parsed()) return cmd_synth_scenario(common, scenario, out_path, synth_scenario_cmd, out);
    if (train_ae_cmd->parsed()) return cmd_train_ae(common, corpus_path, out_path, epochs, frames, train_ae_cmd, out, err);
    if (train_rnn_cmd->parsed()) {
      return cmd_train_rnn(common, corpus_path, model_path, out_path, epochs, train_rnn_cmd, out, err);
    }
    if (eval_cmd->parsed()) return cmd_eval(common, corpus_path, model_path, eval_cmd, out, err);
    if (monitor_cmd->parsed()) return cmd_monitor(common, model_path, wav_path, monitor_cmd, in, out);
    if (simulate_cmd->parsed()) return cmd_simulate(common, scenario, model_path, report_path, simulate_cmd, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.app->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::config_error ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace breath::cli
