// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace asobo {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution of distinct
// plans is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    in_ = fftw_alloc_real(static_cast<size_t>(n));
    out_ = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
    fwd_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, out_, in_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  double* in() { return in_; }
  const fftw_complex* out() const { return out_; }
  fftw_complex* out() { return out_; }
  void forward() { fftw_execute(fwd_); }
  void inverse() { fftw_execute(inv_); }  // unnormalized (scale by 1/n)

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace

std::vector<double> StftConfig::bin_freqs() const {
  std::vector<double> f(static_cast<size_t>(bins()));
  for (int k = 0; k < bins(); ++k)
    f[static_cast<size_t>(k)] = static_cast<double>(k) * sample_rate / fft_size;
  return f;
}

int StftConfig::frame_count(int64_t samples) const {
  if (samples < frame_len)
    throw InvalidInput("stft: signal shorter than one frame (" + std::to_string(samples) + " < " +
                       std::to_string(frame_len) + " samples)");
  return static_cast<int>((samples - frame_len) / hop) + 1;
}

Spectrogram stft(const Eigen::MatrixXd& wave, const StftConfig& cfg) {
  const int M = static_cast<int>(wave.rows());
  const int64_t L = wave.cols();
  const int T = cfg.frame_count(L);
  const int F = cfg.bins();

  // periodic Hann
  Eigen::VectorXd window(cfg.frame_len);
  for (int n = 0; n < cfg.frame_len; ++n)
    window(n) = 0.5 - 0.5 * std::cos(2.0 * kPi * n / cfg.frame_len);

  Spectrogram spec;
  spec.cfg = cfg;
  spec.chan.assign(static_cast<size_t>(M), Eigen::MatrixXcd(T, F));

  RealFft fft(cfg.fft_size);
  for (int m = 0; m < M; ++m) {
    auto& out = spec.chan[static_cast<size_t>(m)];
    for (int t = 0; t < T; ++t) {
      const int64_t off = static_cast<int64_t>(t) * cfg.hop;
      for (int n = 0; n < cfg.frame_len; ++n) fft.in()[n] = wave(m, off + n) * window(n);
      for (int n = cfg.frame_len; n < cfg.fft_size; ++n) fft.in()[n] = 0.0;
      fft.forward();
      for (int k = 0; k < F; ++k) out(t, k) = cd(fft.out()[k][0], fft.out()[k][1]);
    }
  }
  return spec;
}

BeamTensor apply_filterbank(const Spectrogram& spec, const SpatialFilterBank& bank) {
  const int M = spec.channels();
  if (M != bank.geometry.mic_count)
    throw InvalidInput("apply_filterbank: spectrogram has " + std::to_string(M) +
                       " channels, bank expects " + std::to_string(bank.geometry.mic_count));
  if (spec.bins() != bank.bin_count())
    throw InvalidInput("apply_filterbank: bin count mismatch (" + std::to_string(spec.bins()) +
                       " vs " + std::to_string(bank.bin_count()) + ")");
  const auto freqs = spec.cfg.bin_freqs();
  for (int k = 0; k < spec.bins(); ++k)
    if (std::abs(freqs[static_cast<size_t>(k)] - bank.bin_freqs[static_cast<size_t>(k)]) > 1e-6)
      throw InvalidInput("apply_filterbank: bin frequency grid mismatch at bin " +
                         std::to_string(k));

  const int T = spec.frames();
  const int F = spec.bins();
  const int P = bank.filter_count();

  BeamTensor y;
  y.filt.assign(static_cast<size_t>(P), Eigen::MatrixXcd::Zero(T, F));
  for (int p = 0; p < P; ++p) {
    auto& yp = y.filt[static_cast<size_t>(p)];
    const auto& wp = bank.weights[static_cast<size_t>(p)];  // F x M
    for (int m = 0; m < M; ++m) {
      const Eigen::RowVectorXcd wc = wp.col(m).conjugate().transpose();  // 1 x F
      yp.array() += spec.chan[static_cast<size_t>(m)].array().rowwise() * wc.array();
    }
  }
  return y;
}

Eigen::MatrixXd power(const Eigen::MatrixXcd& y) { return y.cwiseAbs2(); }

PowerTensor power(const BeamTensor& y) {
  PowerTensor p;
  p.frames = y.frames();
  p.filters = y.filters();
  p.m.resize(p.frames * p.filters, y.bins());
  for (int t = 0; t < p.frames; ++t)
    for (int q = 0; q < p.filters; ++q)
      p.m.row(t * p.filters + q) = y.filt[static_cast<size_t>(q)].row(t).cwiseAbs2();
  return p;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank MelFilterbank::make(int n_mel, const StftConfig& cfg, double f_low, double f_high) {
  if (n_mel < 1) throw InvalidInput("mel: need at least one filter");
  if (!(f_low >= 0.0 && f_high > f_low)) throw InvalidInput("mel: bad frequency range");

  MelFilterbank mel;
  mel.f_low = f_low;
  mel.f_high = f_high;
  const int F = cfg.bins();
  mel.weights = Eigen::MatrixXd::Zero(n_mel, F);

  const double mel_lo = hz_to_mel(f_low);
  const double mel_hi = hz_to_mel(f_high);
  std::vector<double> edge_hz(static_cast<size_t>(n_mel) + 2);
  for (int i = 0; i < n_mel + 2; ++i)
    edge_hz[static_cast<size_t>(i)] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mel + 1));

  const auto freqs = cfg.bin_freqs();
  for (int i = 0; i < n_mel; ++i) {
    const double lo = edge_hz[static_cast<size_t>(i)];
    const double mid = edge_hz[static_cast<size_t>(i) + 1];
    const double hi = edge_hz[static_cast<size_t>(i) + 2];
    for (int k = 0; k < F; ++k) {
      const double f = freqs[static_cast<size_t>(k)];
      if (f > lo && f < mid)
        mel.weights(i, k) = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        mel.weights(i, k) = (hi - f) / (hi - mid);
    }
  }
  return mel;
}

Eigen::MatrixXd mel_project(const Eigen::MatrixXd& power_spec, const MelFilterbank& mel) {
  if (power_spec.cols() != mel.weights.cols())
    throw InvalidInput("mel_project: bin count mismatch");
  return ((power_spec * mel.weights.transpose()).array() + kLogFloor).log().matrix();
}

std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& h) {
  if (x.empty() || h.empty()) return {};
  const size_t out_len = x.size() + h.size() - 1;
  size_t n = 1;
  while (n < out_len) n <<= 1;

  RealFft fa(static_cast<int>(n));
  RealFft fb(static_cast<int>(n));
  for (size_t i = 0; i < n; ++i) fa.in()[i] = i < x.size() ? x[i] : 0.0;
  for (size_t i = 0; i < n; ++i) fb.in()[i] = i < h.size() ? h[i] : 0.0;
  fa.forward();
  fb.forward();
  const size_t nc = n / 2 + 1;
  for (size_t k = 0; k < nc; ++k) {
    const double ar = fa.out()[k][0], ai = fa.out()[k][1];
    const double br = fb.out()[k][0], bi = fb.out()[k][1];
    fa.out()[k][0] = ar * br - ai * bi;
    fa.out()[k][1] = ar * bi + ai * br;
  }
  fa.inverse();
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < out_len; ++i) out[i] = fa.in()[i] * scale;
  return out;
}

}  // namespace asobo
