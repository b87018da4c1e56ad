#include "diarkit/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "diarkit/error.hpp"

namespace diarkit {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

WavData parse_wav(std::span<const unsigned char> bytes, std::string source_id) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::NotWav, "missing RIFF/WAVE header");
  }

  std::optional<FmtChunk> fmt;
  std::span<const unsigned char> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t size = read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    const bool is_fmt = std::memcmp(hdr, "fmt ", 4) == 0;
    const bool is_data = std::memcmp(hdr, "data", 4) == 0;
    if (size > bytes.size() - body) {
      throw Error(Errc::TruncatedFile, std::string("chunk '") + std::string(hdr, hdr + 4) +
                                           "' declares " + std::to_string(size) +
                                           " bytes, only " + std::to_string(bytes.size() - body) +
                                           " present");
    }
    if (is_fmt) {
      if (size < 16) throw Error(Errc::NotWav, "fmt chunk shorter than 16 bytes");
      FmtChunk f;
      f.format = read_u16(hdr + 8);
      f.channels = read_u16(hdr + 10);
      f.sample_rate = read_u32(hdr + 12);
      f.bits = read_u16(hdr + 22);
      if (f.format == kFormatExtensible) {
        if (size < 40) throw Error(Errc::NotWav, "extensible fmt chunk shorter than 40 bytes");
        // The sub-format GUID starts with the plain format tag.
        f.format = read_u16(hdr + 8 + 24);
      }
      fmt = f;
    } else if (is_data) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1U);
  }

  if (!fmt) throw Error(Errc::NotWav, "no fmt chunk");
  if (!have_data) throw Error(Errc::TruncatedFile, "no data chunk");

  const bool pcm16 = fmt->format == kFormatPcm && fmt->bits == 16;
  const bool float32 = fmt->format == kFormatFloat && fmt->bits == 32;
  if (!pcm16 && !float32) {
    throw Error(Errc::UnsupportedEncoding, "format tag " + std::to_string(fmt->format) + " with " +
                                               std::to_string(fmt->bits) +
                                               " bits; only PCM-16 and float-32 are supported");
  }
  if (fmt->channels == 0) throw Error(Errc::NotWav, "zero channels");
  if (fmt->sample_rate == 0) throw Error(Errc::NotWav, "zero sample rate");

  const std::size_t width = fmt->bits / 8;
  const std::size_t frame_bytes = width * fmt->channels;
  if (data.size() % frame_bytes != 0) {
    throw Error(Errc::TruncatedFile, "data chunk is not a whole number of sample frames");
  }
  const std::size_t n = data.size() / frame_bytes;

  WavData out;
  out.sample_rate = static_cast<int>(fmt->sample_rate);
  out.bits_per_sample = fmt->bits;
  out.source_id = std::move(source_id);
  out.channels.assign(fmt->channels, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < fmt->channels; ++c) {
      const unsigned char* p = data.data() + i * frame_bytes + c * width;
      double v;
      if (pcm16) {
        v = static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else {
        v = static_cast<double>(std::bit_cast<float>(read_u32(p)));
        if (!std::isfinite(v)) v = 0.0;
        v = std::clamp(v, -1.0, 1.0);
      }
      out.channels[c][i] = v;
    }
  }
  return out;
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_wav(bytes, path.stem().string());
}

AudioBuffer downmix_to_mono(std::span<const std::vector<double>> channels, int sample_rate,
                            std::string source_id) {
  if (channels.empty()) throw Error(Errc::EmptyInput, "no channels to downmix");
  const std::size_t n = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != n) {
      throw Error(Errc::LengthMismatch, "channel lengths " + std::to_string(n) + " and " +
                                            std::to_string(ch.size()) + " differ");
    }
  }
  AudioBuffer out{std::vector<double>(n), sample_rate, std::move(source_id)};
  if (channels.size() == 1) {
    out.samples = channels.front();
    return out;
  }
  const double inv = 1.0 / static_cast<double>(channels.size());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& ch : channels) s += ch[i];
    out.samples[i] = s * inv;
  }
  return out;
}

AudioBuffer validate_rate(AudioBuffer buf, int expected_rate) {
  if (buf.sample_rate != expected_rate) throw RateMismatch(buf.sample_rate, expected_rate);
  return buf;
}

AudioBuffer load_mono(const std::filesystem::path& path, int expected_rate, bool* downmixed) {
  WavData wav = read_wav(path);
  if (downmixed) *downmixed = wav.channel_count() > 1;
  AudioBuffer buf = downmix_to_mono(wav.channels, wav.sample_rate, wav.source_id);
  if (buf.samples.empty()) throw Error(Errc::EmptyInput, path.string() + " has no samples");
  return validate_rate(std::move(buf), expected_rate);
}

std::vector<unsigned char> encode_wav_pcm16(const AudioBuffer& buf) {
  const auto data_bytes = static_cast<std::uint32_t>(buf.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double x : buf.samples) {
    const long q = std::lround(std::clamp(x, -1.0, 1.0) * 32768.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return out;
}

void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& buf) {
  const auto bytes = encode_wav_pcm16(buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

}  // namespace diarkit
