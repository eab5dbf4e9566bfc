// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// STFT analysis, beamformer filter-bank application, power spectra and the
// 64-filter Mel projection feeding the classifier.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/array.hpp"
#include "core/common.hpp"

namespace asobo {

struct StftConfig {
  int sample_rate = 16000;
  int frame_len = 400;  // 25 ms
  int hop = 160;        // 10 ms
  int fft_size = 512;

  int bins() const { return fft_size / 2 + 1; }
  std::vector<double> bin_freqs() const;
  // floor((L - frame_len)/hop) + 1; throws if the signal is shorter than one frame
  int frame_count(int64_t samples) const;
  double frame_center_seconds(int t) const {
    return (static_cast<double>(t) * hop + 0.5 * frame_len) / sample_rate;
  }
};

struct Spectrogram {
  std::vector<Eigen::MatrixXcd> chan;  // one T x F matrix per channel
  StftConfig cfg;

  int channels() const { return static_cast<int>(chan.size()); }
  int frames() const { return chan.empty() ? 0 : static_cast<int>(chan[0].rows()); }
  int bins() const { return chan.empty() ? 0 : static_cast<int>(chan[0].cols()); }
};

// Hann-windowed, zero-padded, one-sided STFT of an M x L signal.
Spectrogram stft(const Eigen::MatrixXd& wave, const StftConfig& cfg);

// Beamformed spectra Y_p(t,f) = w_p(f)^H S(t,f), one T x F matrix per filter.
struct BeamTensor {
  std::vector<Eigen::MatrixXcd> filt;
  int frames() const { return filt.empty() ? 0 : static_cast<int>(filt[0].rows()); }
  int filters() const { return static_cast<int>(filt.size()); }
  int bins() const { return filt.empty() ? 0 : static_cast<int>(filt[0].cols()); }
};

BeamTensor apply_filterbank(const Spectrogram& spec, const SpatialFilterBank& bank);

// T*P x F row-major-in-(t,p) power tensor: row t*P + p holds |Y_p(t,:)|^2.
struct PowerTensor {
  int frames = 0;
  int filters = 0;
  Eigen::MatrixXd m;  // (frames*filters) x bins

  int bins() const { return static_cast<int>(m.cols()); }
  auto frame(int t) { return m.middleRows(t * filters, filters); }
  auto frame(int t) const { return m.middleRows(t * filters, filters); }
};

Eigen::MatrixXd power(const Eigen::MatrixXcd& y);
PowerTensor power(const BeamTensor& y);

struct MelFilterbank {
  Eigen::MatrixXd weights;  // n_mel x F, triangular rows
  double f_low = 0.0;
  double f_high = 8000.0;

  int mel_bins() const { return static_cast<int>(weights.rows()); }

  // HTK-scale triangles, no area normalization.
  static MelFilterbank make(int n_mel, const StftConfig& cfg, double f_low, double f_high);
};

inline constexpr double kLogFloor = 1e-10;

// log(mel * power_frame + floor), frames as rows.
Eigen::MatrixXd mel_project(const Eigen::MatrixXd& power_spec, const MelFilterbank& mel);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Linear convolution via zero-padded FFT; |x| + |h| - 1 output samples.
std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& h);

}  // namespace asobo
