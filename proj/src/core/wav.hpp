// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Minimal RIFF/WAVE reader and writer. PCM 16-bit and 32-bit float, any
// channel count. The pipeline requires 16 kHz input and rejects anything else
// (resampling is out of scope).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace asobo {

struct WavInfo {
  int channels = 0;
  int sample_rate = 0;
  int64_t frames = 0;  // samples per channel
  int format = 0;      // 1 = PCM16, 3 = float32
};

WavInfo wav_info(const std::string& path);

// Reads frames [start, start+count). Rows are channels. count < 0 reads to EOF.
// Out-of-range tails are zero-padded so callers can crop near the end.
Eigen::MatrixXd wav_read(const std::string& path, int64_t start = 0, int64_t count = -1);

// 32-bit float, lossless for our double-derived samples within float precision.
void wav_write_float(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate);

// 16-bit PCM with clamping.
void wav_write_pcm16(const std::string& path, const Eigen::MatrixXd& samples, int sample_rate);

}  // namespace asobo
