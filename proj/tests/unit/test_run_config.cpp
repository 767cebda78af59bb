#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "breath/error.hpp"
#include "breath/run_config.hpp"

using namespace breath;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Errc code_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io_error;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c;
  CHECK_NOTHROW(c.validate());
  const AETrainConfig ae = c.ae_config();
  CHECK(ae.epochs == 200);
  CHECK(ae.batch == 32);
  CHECK(ae.learning_rate == 0.05);
  const RNNTrainConfig rnn = c.rnn_config();
  CHECK(rnn.epochs == 300);
  CHECK(rnn.learning_rate == 0.01);
  CHECK(rnn.hidden == 75);
  CHECK(rnn.clip_norm == 5.0);
  const MonitorConfig m = c.monitor_config();
  CHECK(m.debounce.confidence == 0.99);
  CHECK(m.debounce.run_length == 3);
  CHECK(m.vigil.capacity == 20);
  CHECK(m.vigil.ci_level == 0.80);
}

TEST_CASE("parsing") {
  const RunConfig c = parse("# comment\n\nseed = 42\nrnn.hidden=30\nrnn.noise_aug=false\nvigil.alpha=0.01\n"
                            "corpus.path = data/corpus\n");
  CHECK(c.seed == 42);
  CHECK(c.rnn_hidden == 30);
  CHECK_FALSE(c.rnn_noise_aug);
  CHECK(c.alpha == 0.01);
  CHECK(c.corpus_path == "data/corpus");
  CHECK(c.rnn_config().seed == 42);
}

TEST_CASE("write then parse reproduces the configuration") {
  RunConfig c;
  c.seed = 99;
  c.ae_lr = 0.125;
  c.refractory = 0.75;
  c.model_path = "m.bsm";
  std::ostringstream out;
  write_config(out, c);
  const RunConfig back = parse(out.str());
  CHECK(back.seed == 99);
  CHECK(back.ae_lr == 0.125);
  CHECK(back.refractory == 0.75);
  CHECK(back.model_path == "m.bsm");
}

TEST_CASE("errors") {
  CHECK(code_of("bogus.key=1\n") == Errc::config_error);
  CHECK(code_of("seed=abc\n") == Errc::config_error);
  CHECK(code_of("rnn.noise_aug=maybe\n") == Errc::config_error);
  CHECK(code_of("stream.confidence=1.5\n") == Errc::config_error);
  CHECK(code_of("vigil.k=3\n") == Errc::config_error);
  CHECK(code_of("rnn.hidden=0\n") == Errc::config_error);
  try {
    (void)parse("seed=1\njust words\n");
    FAIL("line without '=' accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    (void)load_config("/nonexistent/breath.conf");
    FAIL("missing file accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io_error);
  }
}

TEST_CASE("environment seed override") {
  RunConfig c;
  c.seed = 5;
  ::unsetenv(kSeedEnvVar);
  apply_environment(c);
  CHECK(c.seed == 5);
  ::setenv(kSeedEnvVar, "123", 1);
  apply_environment(c);
  CHECK(c.seed == 123);
  ::setenv(kSeedEnvVar, "12x", 1);
  CHECK_THROWS_AS(apply_environment(c), Error);
  ::unsetenv(kSeedEnvVar);
}
