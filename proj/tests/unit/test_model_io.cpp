#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "breath/error.hpp"
#include "breath/model_io.hpp"
#include "breath/rng.hpp"

using namespace breath;

namespace {

ModelBundle sample_bundle(std::size_t hidden = 75) {
  ModelBundle b{init_ae(3), init_rnn(4, hidden), {}};
  Rng rng(5);
  for (double& v : b.rnn.b_y()) v = rng.normal();
  b.metadata["seed"] = "3";
  b.metadata["corpus.fingerprint"] = "0123456789abcdef";
  return b;
}

std::string bytes_of(const ModelBundle& b) {
  std::ostringstream out;
  write_model(out, b);
  return out.str();
}

Errc code_of(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    (void)read_model(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io_error;
}

}  // namespace

TEST_CASE("round trip is exact after rounding to binary32") {
  for (std::size_t hidden : {75u, 7u}) {
    ModelBundle b = sample_bundle(hidden);
    const std::string bytes = bytes_of(b);
    std::istringstream in(bytes);
    const ModelBundle back = read_model(in);
    round_to_float(b);
    CHECK(back.ae == b.ae);
    CHECK(back.rnn == b.rnn);
    CHECK(back.rnn.hidden() == hidden);
    CHECK(back.metadata == b.metadata);
    CHECK(bytes_of(back) == bytes);
  }
}

TEST_CASE("file layout") {
  const std::string bytes = bytes_of(sample_bundle());
  CHECK(bytes.substr(0, 4) == "BSM1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  // First tensor: rank 2, 1024 x 256.
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0);
  CHECK(static_cast<unsigned char>(bytes[13]) == 4);
  CHECK(bytes.find("corpus.fingerprint=0123456789abcdef\nseed=3\n") != std::string::npos);
}

TEST_CASE("rounding is idempotent") {
  ModelBundle b = sample_bundle();
  round_to_float(b);
  ModelBundle c = b;
  round_to_float(c);
  CHECK(b.ae == c.ae);
  CHECK(b.rnn == c.rnn);
}

TEST_CASE("corrupt files") {
  const std::string good = bytes_of(sample_bundle());
  SUBCASE("bad magic") {
    std::string b = good;
    b[3] = '2';
    CHECK(code_of(b) == Errc::bad_magic);
    CHECK(code_of("") == Errc::bad_magic);
  }
  SUBCASE("version") {
    std::string b = good;
    b[4] = 2;
    CHECK(code_of(b) == Errc::version_mismatch);
  }
  SUBCASE("truncation names the tensor") {
    std::istringstream in(good.substr(0, 5000));
    try {
      (void)read_model(in);
      FAIL("truncated file accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::truncated_file);
      CHECK(std::string(e.what()).find("ae.w0") != std::string::npos);
    }
    CHECK(code_of(good.substr(0, good.size() - 3)) == Errc::truncated_file);
  }
  SUBCASE("wrong shape") {
    std::string b = good;
    b[12] = 1;  // ae.w0 rows 1025
    CHECK(code_of(b) == Errc::shape_mismatch);
  }
}

TEST_CASE("metadata keys may not contain separators") {
  ModelBundle b = sample_bundle();
  b.metadata["a=b"] = "x";
  std::ostringstream out;
  CHECK_THROWS_AS(write_model(out, b), Error);
}

TEST_CASE("files on disk") {
  const auto path = std::filesystem::temp_directory_path() / "breath_test_model.bsm";
  ModelBundle b = sample_bundle();
  save_model(b, path);
  const ModelBundle back = load_model(path);
  round_to_float(b);
  CHECK(back.rnn == b.rnn);
  std::filesystem::remove(path);
  try {
    (void)load_model(path);
    FAIL("missing file loaded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io_error);
  }
}
