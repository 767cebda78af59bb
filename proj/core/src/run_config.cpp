#include "breath/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "breath/error.hpp"

namespace breath {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw Error(Errc::config_error, "invalid value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(Errc::config_error, "invalid boolean for " + key + ": '" + value + "'");
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(Errc::config_error, message);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  auto sz = [&] { return parse_number<std::size_t>(key, value); };
  auto dbl = [&] { return parse_number<double>(key, value); };

  if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "ae.epochs") ae_epochs = sz();
  else if (key == "ae.batch") ae_batch = sz();
  else if (key == "ae.lr") ae_lr = dbl();
  else if (key == "ae.frames") ae_frames = sz();
  else if (key == "rnn.epochs") rnn_epochs = sz();
  else if (key == "rnn.lr") rnn_lr = dbl();
  else if (key == "rnn.hidden") rnn_hidden = sz();
  else if (key == "rnn.noise_aug") rnn_noise_aug = parse_bool(key, value);
  else if (key == "rnn.clip_norm") rnn_clip_norm = dbl();
  else if (key == "stream.confidence") confidence = dbl();
  else if (key == "stream.run_length") run_length = sz();
  else if (key == "stream.refractory") refractory = dbl();
  else if (key == "vigil.k") interval_capacity = sz();
  else if (key == "vigil.alpha") alpha = dbl();
  else if (key == "vigil.ci_level") ci_level = dbl();
  else if (key == "vigil.floor") floor_seconds = dbl();
  else if (key == "match.tolerance") match_tolerance = dbl();
  else if (key == "corpus.path") corpus_path = value;
  else if (key == "model.path") model_path = value;
  else throw Error(Errc::config_error, "unknown key '" + key + "'");
}

void RunConfig::validate() const {
  require(ae_epochs <= 1'000'000 && rnn_epochs <= 1'000'000, "epochs must be at most 1000000");
  require(ae_batch >= 1, "ae.batch must be at least 1");
  require(ae_lr > 0.0 && rnn_lr > 0.0, "learning rates must be positive");
  require(rnn_hidden >= 1 && rnn_hidden <= 1024, "rnn.hidden must lie in [1, 1024]");
  require(rnn_clip_norm > 0.0, "rnn.clip_norm must be positive");
  require(confidence > 0.5 && confidence < 1.0, "stream.confidence must lie in (0.5, 1)");
  require(run_length >= 1 && run_length <= 16, "stream.run_length must lie in [1, 16]");
  require(refractory >= 0.0 && refractory <= 10.0, "stream.refractory must lie in [0, 10]");
  require(interval_capacity >= 8 && interval_capacity <= 1000, "vigil.k must lie in [8, 1000]");
  require(alpha > 0.0 && alpha < 0.5, "vigil.alpha must lie in (0, 0.5)");
  require(ci_level > 0.0 && ci_level < 1.0, "vigil.ci_level must lie in (0, 1)");
  require(floor_seconds >= 0.0 && floor_seconds <= 10.0, "vigil.floor must lie in [0, 10]");
  require(match_tolerance > 0.0 && match_tolerance <= 5.0, "match.tolerance must lie in (0, 5]");
}

AETrainConfig RunConfig::ae_config() const {
  return {ae_epochs, ae_batch, seed, ae_lr, ae_frames};
}

RNNTrainConfig RunConfig::rnn_config() const {
  return {rnn_epochs, seed, rnn_lr, rnn_hidden, rnn_noise_aug, rnn_clip_norm};
}

MonitorConfig RunConfig::monitor_config() const {
  MonitorConfig m;
  m.debounce.confidence = confidence;
  m.debounce.run_length = run_length;
  m.debounce.refractory = refractory;
  m.vigil.capacity = interval_capacity;
  m.vigil.alpha = alpha;
  m.vigil.ci_level = ci_level;
  m.vigil.floor_seconds = floor_seconds;
  return m;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::config_error, "line " + std::to_string(number) + ": expected key=value");
    }
    c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config " + path.string());
  return parse_config(in);
}

void apply_environment(RunConfig& config) {
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    config.seed = parse_number<std::uint64_t>(kSeedEnvVar, env);
  }
}

void write_config(std::ostream& out, const RunConfig& c) {
  out << "seed=" << c.seed << '\n'
      << "ae.epochs=" << c.ae_epochs << '\n'
      << "ae.batch=" << c.ae_batch << '\n'
      << "ae.lr=" << c.ae_lr << '\n'
      << "ae.frames=" << c.ae_frames << '\n'
      << "rnn.epochs=" << c.rnn_epochs << '\n'
      << "rnn.lr=" << c.rnn_lr << '\n'
      << "rnn.hidden=" << c.rnn_hidden << '\n'
      << "rnn.noise_aug=" << (c.rnn_noise_aug ? "true" : "false") << '\n'
      << "rnn.clip_norm=" << c.rnn_clip_norm << '\n'
      << "stream.confidence=" << c.confidence << '\n'
      << "stream.run_length=" << c.run_length << '\n'
      << "stream.refractory=" << c.refractory << '\n'
      << "vigil.k=" << c.interval_capacity << '\n'
      << "vigil.alpha=" << c.alpha << '\n'
      << "vigil.ci_level=" << c.ci_level << '\n'
      << "vigil.floor=" << c.floor_seconds << '\n'
      << "match.tolerance=" << c.match_tolerance << '\n';
  if (!c.corpus_path.empty()) out << "corpus.path=" << c.corpus_path << '\n';
  if (!c.model_path.empty()) out << "model.path=" << c.model_path << '\n';
}

}  // namespace breath
