#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "breath/autoencoder.hpp"
#include "breath/rnn.hpp"

namespace breath {

inline constexpr char kModelMagic[4] = {'B', 'S', 'M', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

// Trained autoencoder + classifier with free-form provenance metadata.
struct ModelBundle {
  AEParams ae;
  RNNParams rnn;
  std::map<std::string, std::string> metadata;
};

// Layout (all integers unsigned 32-bit little-endian):
//   "BSM1" | version | 13 tensors | metadata
// Tensor: rank, dims..., values as IEEE-754 binary32 LE, row-major. Order:
//   ae.w0 ae.b0 ae.w1 ae.b1 ae.w2 ae.b2 ae.w3 ae.b3
//   rnn.w_xh rnn.w_hh rnn.b_h rnn.w_hy rnn.b_y
// Metadata: byte length, then UTF-8 "key=value\n" lines sorted by key.
// Parameters are rounded to binary32 on save.
void write_model(std::ostream& out, const ModelBundle& bundle);
ModelBundle read_model(std::istream& in);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
// Throws Errc::bad_magic, Errc::version_mismatch, Errc::truncated_file.
ModelBundle load_model(const std::filesystem::path& path);

// Rounds every parameter to binary32, i.e. the values a save/load cycle yields.
void round_to_float(ModelBundle& bundle);

}  // namespace breath
