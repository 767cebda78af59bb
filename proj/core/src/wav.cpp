#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "breath/dsp.hpp"
#include "breath/error.hpp"

namespace breath {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

bool read_exact(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

struct FormatChunk {
  std::uint16_t audio_format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

void check_format(const FormatChunk& fmt) {
  if (fmt.audio_format != 1) {
    throw Error(Errc::unsupported_format,
                "audio_format=" + std::to_string(fmt.audio_format) + " (expected 1, PCM)");
  }
  if (fmt.bits_per_sample != 16) {
    throw Error(Errc::unsupported_format,
                "bits_per_sample=" + std::to_string(fmt.bits_per_sample) + " (expected 16)");
  }
  if (fmt.channels != 1) {
    throw Error(Errc::unsupported_format,
                "channels=" + std::to_string(fmt.channels) + " (expected 1)");
  }
  if (fmt.sample_rate != static_cast<std::uint32_t>(kSampleRate)) {
    throw Error(Errc::unsupported_format, "sample_rate=" + std::to_string(fmt.sample_rate) +
                                              " (expected " + std::to_string(kSampleRate) + ")");
  }
}

}  // namespace

float pcm_to_amplitude(std::int16_t value) noexcept {
  return static_cast<float>(value) / 32768.0f;
}

std::int16_t amplitude_to_pcm(double amplitude) noexcept {
  const double scaled = std::round(amplitude * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::size_t read_wav_header(std::istream& in) {
  std::array<unsigned char, 12> riff{};
  if (!read_exact(in, riff.data(), riff.size()) || std::memcmp(riff.data(), "RIFF", 4) != 0 ||
      std::memcmp(riff.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::not_wav, "missing RIFF/WAVE header");
  }

  std::optional<FormatChunk> fmt;
  while (true) {
    std::array<unsigned char, 8> header{};
    if (!read_exact(in, header.data(), header.size())) {
      throw Error(Errc::unsupported_format, "data chunk not found");
    }
    const std::uint32_t size = read_u32(header.data() + 4);
    const std::string id(reinterpret_cast<const char*>(header.data()), 4);

    if (id == "fmt ") {
      if (size < 16) throw Error(Errc::unsupported_format, "fmt chunk too short");
      std::vector<unsigned char> body(size + (size & 1u));
      if (!read_exact(in, body.data(), body.size())) {
        throw Error(Errc::unsupported_format, "truncated fmt chunk");
      }
      FormatChunk f;
      f.audio_format = read_u16(body.data());
      f.channels = read_u16(body.data() + 2);
      f.sample_rate = read_u32(body.data() + 4);
      f.bits_per_sample = read_u16(body.data() + 14);
      check_format(f);
      fmt = f;
    } else if (id == "data") {
      if (!fmt) throw Error(Errc::unsupported_format, "data chunk precedes fmt chunk");
      return size / 2;
    } else {
      // Chunks are word-aligned.
      in.ignore(static_cast<std::streamsize>(size + (size & 1u)));
      if (!in) throw Error(Errc::unsupported_format, "truncated chunk '" + id + "'");
    }
  }
}

AudioClip read_wav(std::istream& in) {
  const std::size_t count = read_wav_header(in);
  std::vector<unsigned char> body(count * 2);
  if (!read_exact(in, body.data(), body.size())) {
    throw Error(Errc::unsupported_format, "truncated data chunk");
  }
  AudioClip clip;
  clip.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    clip.samples[i] = pcm_to_amplitude(static_cast<std::int16_t>(read_u16(body.data() + 2 * i)));
  }
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return read_wav(in);
}

void write_wav(std::ostream& out, const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(kSampleRate));
  put_u32(out, static_cast<std::uint32_t>(kSampleRate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.write("data", 4);
  put_u32(out, data_bytes);
  for (float s : clip.samples) put_u16(out, static_cast<std::uint16_t>(amplitude_to_pcm(s)));
}

void save_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  write_wav(out, clip);
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

}  // namespace breath
