#include "breath/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <vector>

#include "breath/error.hpp"

namespace breath {
namespace {

template <typename T>
struct TensorRef {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::span<T> values;
};

// Views of every tensor in file order; Bundle may be const.
template <typename Bundle>
auto tensors_of(Bundle& b) {
  using T = std::conditional_t<std::is_const_v<Bundle>, const double, double>;
  std::vector<TensorRef<T>> out;
  for (std::size_t l = 0; l < kAeLayers; ++l) {
    auto w = b.ae.weight(l);
    auto bias = b.ae.bias(l);
    out.push_back({"ae.w" + std::to_string(l),
                   {static_cast<std::uint32_t>(w.rows()), static_cast<std::uint32_t>(w.cols())},
                   {w.data(), static_cast<std::size_t>(w.size())}});
    out.push_back({"ae.b" + std::to_string(l),
                   {static_cast<std::uint32_t>(bias.size())},
                   {bias.data(), static_cast<std::size_t>(bias.size())}});
  }
  auto mat = [&](const char* name, auto m) {
    out.push_back({name,
                   {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())},
                   {m.data(), static_cast<std::size_t>(m.size())}});
  };
  auto vec = [&](const char* name, auto v) {
    out.push_back({name, {static_cast<std::uint32_t>(v.size())}, {v.data(), static_cast<std::size_t>(v.size())}});
  };
  mat("rnn.w_xh", b.rnn.w_xh());
  mat("rnn.w_hh", b.rnn.w_hh());
  vec("rnn.b_h", b.rnn.b_h());
  mat("rnn.w_hy", b.rnn.w_hy());
  vec("rnn.b_y", b.rnn.b_y());
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint32_t u32(const std::string& what) {
    std::array<unsigned char, 4> b{};
    bytes(b.data(), 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  void bytes(unsigned char* dst, std::size_t n, const std::string& what) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(Errc::truncated_file, "file ends inside " + what);
    }
  }

 private:
  std::istream& in_;
};

std::string metadata_block(const std::map<std::string, std::string>& meta) {
  std::string s;
  for (const auto& [k, v] : meta) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw Error(Errc::domain_error, "metadata key/value may not contain '=' (key) or newlines: " + k);
    }
    s += k;
    s += '=';
    s += v;
    s += '\n';
  }
  return s;
}

}  // namespace

void write_model(std::ostream& out, const ModelBundle& bundle) {
  out.write(kModelMagic, 4);
  put_u32(out, kModelVersion);
  for (const auto& t : tensors_of(bundle)) {
    put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) put_u32(out, d);
    for (double v : t.values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  const std::string meta = metadata_block(bundle.metadata);
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
}

ModelBundle read_model(std::istream& in) {
  Reader r(in);
  std::array<unsigned char, 4> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), 4);
  if (in.gcount() != 4 || std::memcmp(magic.data(), kModelMagic, 4) != 0) {
    throw Error(Errc::bad_magic, "not a model bundle (expected \"BSM1\")");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kModelVersion) {
    throw Error(Errc::version_mismatch,
                "file version " + std::to_string(version) + ", supported " + std::to_string(kModelVersion));
  }

  // Hidden size is only known once rnn.w_xh has been read, so the ae tensors
  // are read into a default bundle first and the rnn part resized after.
  ModelBundle bundle;
  auto refs = tensors_of(bundle);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& t = refs[i];
    const std::uint32_t rank = r.u32("tensor " + t.name);
    if (rank != t.dims.size()) throw Error(Errc::shape_mismatch, "tensor " + t.name + " has rank " + std::to_string(rank));
    std::vector<std::uint32_t> dims(rank);
    for (auto& d : dims) d = r.u32("tensor " + t.name);

    if (t.name == "rnn.w_xh") {
      if (rank != 2 || dims[0] != kLatentSize || dims[1] == 0) {
        throw Error(Errc::shape_mismatch, "tensor rnn.w_xh has unexpected shape");
      }
      if (dims[1] != bundle.rnn.hidden()) {
        bundle.rnn = RNNParams(dims[1]);
        auto fresh = tensors_of(bundle);
        for (std::size_t j = i; j < refs.size(); ++j) refs[j] = fresh[j];
      }
    }
    if (dims != t.dims) throw Error(Errc::shape_mismatch, "tensor " + t.name + " has unexpected shape");

    std::vector<unsigned char> raw(t.values.size() * 4);
    r.bytes(raw.data(), raw.size(), "tensor " + t.name);
    for (std::size_t k = 0; k < t.values.size(); ++k) {
      const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * k]) |
                                 (static_cast<std::uint32_t>(raw[4 * k + 1]) << 8) |
                                 (static_cast<std::uint32_t>(raw[4 * k + 2]) << 16) |
                                 (static_cast<std::uint32_t>(raw[4 * k + 3]) << 24);
      t.values[k] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }

  const std::uint32_t meta_len = r.u32("metadata");
  std::string meta(meta_len, '\0');
  r.bytes(reinterpret_cast<unsigned char*>(meta.data()), meta_len, "metadata");
  std::istringstream lines(meta);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::truncated_file, "malformed metadata line: " + line);
    bundle.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return bundle;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  write_model(out, bundle);
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return read_model(in);
}

void round_to_float(ModelBundle& bundle) {
  for (double& v : bundle.ae.data()) v = static_cast<float>(v);
  for (double& v : bundle.rnn.data()) v = static_cast<float>(v);
}

}  // namespace breath
