// svkit/audio.hpp

// Copyright 2026  svkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "svkit/common.hpp"

namespace svkit {

/// Mono waveform with amplitudes nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return static_cast<double>(samples.size()) /
           static_cast<double>(sample_rate);
  }

  void validate() const {
    require(sample_rate > 0, "audio: sample rate must be positive");
    for (double s : samples)
      require(std::isfinite(s), "audio: non-finite sample");
  }
};

namespace detail {

inline std::uint32_t read_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint16_t read_u16_le(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] |
                                    (static_cast<std::uint16_t>(b[1]) << 8));
}

inline void write_u32_le(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void write_u16_le(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace detail

/// Reads a RIFF/WAVE file.  Only 16-bit PCM mono is accepted; anything else
/// is rejected with a FormatError naming the offending field.
inline AudioSignal read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(message("cannot open '", path, "'"));

  char riff[4], wave[4];
  is.read(riff, 4);
  detail::read_u32_le(is);
  is.read(wave, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(wave, "WAVE", 4) != 0)
    throw FormatError(message("'", path, "': not a RIFF/WAVE file"));

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  AudioSignal signal;

  while (true) {
    char id[4];
    is.read(id, 4);
    if (!is) break;
    const std::uint32_t size = detail::read_u32_le(is);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      require(size >= 16, "'", path, "': fmt chunk too small");
      format = detail::read_u16_le(is);
      channels = detail::read_u16_le(is);
      sample_rate = detail::read_u32_le(is);
      detail::read_u32_le(is);  // byte rate
      detail::read_u16_le(is);  // block align
      bits = detail::read_u16_le(is);
      is.ignore(size - 16 + (size % 2));
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt)
        throw FormatError(message("'", path, "': data chunk before fmt"));
      if (format != 1)
        throw FormatError(message("'", path, "': unsupported audio format ",
                                  format, " (only PCM is accepted)"));
      if (channels != 1)
        throw FormatError(message("'", path, "': ", channels,
                                  " channels (only mono is accepted)"));
      if (bits != 16)
        throw FormatError(message("'", path, "': ", bits,
                                  " bits per sample (only 16 is accepted)"));
      const std::size_t n = size / 2;
      signal.samples.resize(n);
      std::vector<char> raw(size);
      is.read(raw.data(), static_cast<std::streamsize>(size));
      if (!is)
        throw FormatError(message("'", path, "': truncated data chunk"));
      for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t v = static_cast<std::int16_t>(
            static_cast<unsigned char>(raw[2 * i]) |
            (static_cast<unsigned char>(raw[2 * i + 1]) << 8));
        signal.samples[i] = static_cast<double>(v) / 32768.0;
      }
      signal.sample_rate = static_cast<int>(sample_rate);
      return signal;
    } else {
      is.ignore(size + (size % 2));
    }
  }
  throw FormatError(message("'", path, "': no data chunk found"));
}

/// Writes 16-bit PCM mono.  Samples are clipped to [-1, 1] and quantized by
/// 32768 so that read/write round-trips are stable after one quantization.
inline void write_wav(const AudioSignal& signal, const std::string& path) {
  signal.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(message("cannot write '", path, "'"));

  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(signal.samples.size() * 2);
  os.write("RIFF", 4);
  detail::write_u32_le(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  detail::write_u32_le(os, 16);
  detail::write_u16_le(os, 1);  // PCM
  detail::write_u16_le(os, 1);  // mono
  detail::write_u32_le(os, static_cast<std::uint32_t>(signal.sample_rate));
  detail::write_u32_le(os,
                       static_cast<std::uint32_t>(signal.sample_rate * 2));
  detail::write_u16_le(os, 2);
  detail::write_u16_le(os, 16);
  os.write("data", 4);
  detail::write_u32_le(os, data_bytes);
  for (double s : signal.samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const long v = std::lround(clipped * 32768.0);
    detail::write_u16_le(
        os, static_cast<std::uint16_t>(
                std::clamp<long>(v, -32768, 32767) & 0xffff));
  }
  if (!os) throw Error(message("failed writing '", path, "'"));
}

}  // namespace svkit
