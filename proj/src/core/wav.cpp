// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/wav.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include "core/common.hpp"

namespace asobo {

namespace {

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

struct WavLayout {
  FmtChunk fmt;
  int64_t data_offset = 0;
  int64_t data_bytes = 0;
};

uint32_t read_u32(std::ifstream& in, const std::string& path) {
  uint32_t v;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (in.gcount() != 4) throw InvalidInput("truncated wav: " + path);
  return v;
}

WavLayout parse_wav(std::ifstream& in, const std::string& path) {
  char tag[4];
  in.read(tag, 4);
  if (in.gcount() != 4 || std::memcmp(tag, "RIFF", 4) != 0)
    throw InvalidInput("not a RIFF file: " + path);
  read_u32(in, path);  // riff size
  in.read(tag, 4);
  if (in.gcount() != 4 || std::memcmp(tag, "WAVE", 4) != 0)
    throw InvalidInput("not a WAVE file: " + path);

  WavLayout lay;
  bool have_fmt = false;
  while (in.read(tag, 4)) {
    const uint32_t size = read_u32(in, path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      std::vector<char> buf(size);
      in.read(buf.data(), size);
      if (size < 16) throw InvalidInput("bad fmt chunk: " + path);
      std::memcpy(&lay.fmt.format, buf.data() + 0, 2);
      std::memcpy(&lay.fmt.channels, buf.data() + 2, 2);
      std::memcpy(&lay.fmt.sample_rate, buf.data() + 4, 4);
      std::memcpy(&lay.fmt.bits, buf.data() + 14, 2);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      lay.data_offset = in.tellg();
      lay.data_bytes = size;
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || lay.data_offset == 0) throw InvalidInput("missing fmt/data chunk: " + path);
  const bool pcm16 = lay.fmt.format == 1 && lay.fmt.bits == 16;
  const bool f32 = lay.fmt.format == 3 && lay.fmt.bits == 32;
  if (!pcm16 && !f32)
    throw InvalidInput("unsupported wav encoding (want PCM16 or float32): " + path);
  if (lay.fmt.channels == 0) throw InvalidInput("zero channels: " + path);
  return lay;
}

}  // namespace

WavInfo wav_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open: " + path);
  const WavLayout lay = parse_wav(in, path);
  WavInfo info;
  info.channels = lay.fmt.channels;
  info.sample_rate = static_cast<int>(lay.fmt.sample_rate);
  info.format = lay.fmt.format;
  const int bytes_per = lay.fmt.bits / 8;
  info.frames = lay.data_bytes / (bytes_per * lay.fmt.channels);
  return info;
}

Eigen::MatrixXd wav_read(const std::string& path, int64_t start, int64_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open: " + path);
  const WavLayout lay = parse_wav(in, path);
  const int ch = lay.fmt.channels;
  const int bytes_per = lay.fmt.bits / 8;
  const int64_t total = lay.data_bytes / (bytes_per * ch);
  if (start < 0) throw InvalidInput("negative start frame");
  if (count < 0) count = std::max<int64_t>(0, total - start);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ch, count);
  const int64_t avail = std::clamp<int64_t>(total - start, 0, count);
  if (avail > 0) {
    in.seekg(lay.data_offset + start * bytes_per * ch, std::ios::beg);
    std::vector<char> buf(static_cast<size_t>(avail) * static_cast<size_t>(bytes_per) * static_cast<size_t>(ch));
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(in.gcount()) != buf.size()) throw InvalidInput("truncated wav data: " + path);
    if (lay.fmt.format == 1) {
      const int16_t* s = reinterpret_cast<const int16_t*>(buf.data());
      for (int64_t i = 0; i < avail; ++i)
        for (int c = 0; c < ch; ++c) out(c, i) = static_cast<double>(s[i * ch + c]) / 32768.0;
    } else {
      const float* s = reinterpret_cast<const float*>(buf.data());
      for (int64_t i = 0; i < avail; ++i)
        for (int c = 0; c < ch; ++c) out(c, i) = static_cast<double>(s[i * ch + c]);
    }
  }
  return out;
}

namespace {

void write_header(std::ofstream& out, int channels, int sample_rate, int bits, uint16_t format,
                  uint32_t data_bytes) {
  const uint32_t byte_rate = static_cast<uint32_t>(sample_rate * channels * bits / 8);
  const uint16_t block_align = static_cast<uint16_t>(channels * bits / 8);
  const uint32_t riff_size = 36 + data_bytes;
  out.write("RIFF", 4);
  out.write(reinterpret_cast<const char*>(&riff_size), 4);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  const uint32_t fmt_size = 16;
  out.write(reinterpret_cast<const char*>(&fmt_size), 4);
  const uint16_t ch16 = static_cast<uint16_t>(channels);
  const uint32_t sr = static_cast<uint32_t>(sample_rate);
  const uint16_t bits16 = static_cast<uint16_t>(bits);
  out.write(reinterpret_cast<const char*>(&format), 2);
  out.write(reinterpret_cast<const char*>(&ch16), 2);
  out.write(reinterpret_cast<const char*>(&sr), 4);
  out.write(reinterpret_cast<const char*>(&byte_rate), 4);
  out.write(reinterpret_cast<const char*>(&block_align), 2);
  out.write(reinterpret_cast<const char*>(&bits16), 2);
  out.write("data", 4);
  out.write(reinterpret_cast<const char*>(&data_bytes), 4);
}

}  // namespace

void wav_write_float(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  const int ch = static_cast<int>(samples.rows());
  const int64_t n = samples.cols();
  write_header(out, ch, sample_rate, 32, 3, static_cast<uint32_t>(n * ch * 4));
  std::vector<float> buf(static_cast<size_t>(n) * static_cast<size_t>(ch));
  for (int64_t i = 0; i < n; ++i)
    for (int c = 0; c < ch; ++c) buf[static_cast<size_t>(i * ch + c)] = static_cast<float>(samples(c, i));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
}

void wav_write_pcm16(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  const int ch = static_cast<int>(samples.rows());
  const int64_t n = samples.cols();
  write_header(out, ch, sample_rate, 16, 1, static_cast<uint32_t>(n * ch * 2));
  std::vector<int16_t> buf(static_cast<size_t>(n) * static_cast<size_t>(ch));
  for (int64_t i = 0; i < n; ++i) {
    for (int c = 0; c < ch; ++c) {
      const double v = std::clamp(samples(c, i), -1.0, 1.0);
      buf[static_cast<size_t>(i * ch + c)] = static_cast<int16_t>(std::lrint(v * 32767.0));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 2));
}

}  // namespace asobo
