// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/array.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "core/binfile.hpp"

namespace asobo {

ArrayGeometry ArrayGeometry::uniform_circular(int mics, double radius, double sound_speed) {
  ArrayGeometry g;
  g.mic_count = mics;
  g.radius = radius;
  g.sound_speed = sound_speed;
  g.mic_angles.resize(static_cast<size_t>(mics));
  for (int m = 0; m < mics; ++m) g.mic_angles[static_cast<size_t>(m)] = 2.0 * kPi * m / mics;
  g.validate();
  return g;
}

void ArrayGeometry::validate() const {
  if (mic_count < 2) throw InvalidInput("array: need at least 2 microphones");
  if (radius <= 0.0) throw InvalidInput("array: radius must be positive");
  if (sound_speed <= 0.0) throw InvalidInput("array: sound speed must be positive");
  if (static_cast<int>(mic_angles.size()) != mic_count)
    throw InvalidInput("array: mic_angles length does not match mic_count");
  for (int m = 0; m < mic_count; ++m) {
    const double a = mic_angles[static_cast<size_t>(m)];
    if (a < 0.0 || a >= 2.0 * kPi) throw InvalidInput("array: mic angle outside [0, 2pi)");
    if (m > 0 && a <= mic_angles[static_cast<size_t>(m - 1)])
      throw InvalidInput("array: mic angles must be strictly increasing");
  }
}

Eigen::Vector3d ArrayGeometry::mic_position(int m, const Eigen::Vector3d& center) const {
  const double psi = mic_angles.at(static_cast<size_t>(m));
  return center + Eigen::Vector3d(radius * std::cos(psi), radius * std::sin(psi), 0.0);
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta, double freq_hz) {
  if (freq_hz < 0.0) throw InvalidInput("steering_vector: negative frequency");
  Eigen::VectorXcd v(geom.mic_count);
  const double k = 2.0 * kPi * freq_hz * geom.radius / geom.sound_speed;
  for (int m = 0; m < geom.mic_count; ++m) {
    const double phase = k * std::cos(theta - geom.mic_angles[static_cast<size_t>(m)]);
    v(m) = cd(std::cos(phase), std::sin(phase));
  }
  return v;
}

static double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(x) / x;
}

Eigen::MatrixXd diffuse_noise_coherence(const ArrayGeometry& geom, double freq_hz,
                                        double loading) {
  if (loading < 0.0) throw InvalidInput("coherence: loading must be nonnegative");
  const int M = geom.mic_count;
  Eigen::MatrixXd sigma(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double dpsi = geom.mic_angles[static_cast<size_t>(i)] - geom.mic_angles[static_cast<size_t>(j)];
      const double dist = 2.0 * geom.radius * std::abs(std::sin(dpsi / 2.0));
      const double v = sinc(2.0 * kPi * freq_hz * dist / geom.sound_speed);
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
    sigma(i, i) = 1.0 + loading;
  }
  return sigma;
}

SpatialFilterBank design_filterbank(const ArrayGeometry& geom, int filter_count,
                                    const std::vector<double>& bin_freqs, double diag_loading,
                                    NoiseModel noise_model) {
  geom.validate();
  if (filter_count < 1) throw InvalidInput("design_filterbank: filter count must be >= 1");
  if (bin_freqs.empty()) throw InvalidInput("design_filterbank: no frequency bins");
  for (double f : bin_freqs)
    if (f < 0.0) throw InvalidInput("design_filterbank: negative bin frequency");

  SpatialFilterBank bank;
  bank.geometry = geom;
  bank.bin_freqs = bin_freqs;
  bank.diag_loading = diag_loading;
  bank.noise_model = noise_model;
  bank.steer_angles.resize(static_cast<size_t>(filter_count));
  for (int p = 0; p < filter_count; ++p)
    bank.steer_angles[static_cast<size_t>(p)] = 2.0 * kPi * p / filter_count;

  const int M = geom.mic_count;
  const int F = static_cast<int>(bin_freqs.size());
  bank.weights.assign(static_cast<size_t>(filter_count), Eigen::MatrixXcd(F, M));

  for (int f = 0; f < F; ++f) {
    Eigen::MatrixXcd sigma;
    if (noise_model == NoiseModel::kIdentity) {
      sigma = Eigen::MatrixXcd::Identity(M, M);
    } else {
      sigma = diffuse_noise_coherence(geom, bin_freqs[static_cast<size_t>(f)], diag_loading)
                  .cast<cd>();
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw NumericError("design_filterbank: coherence not positive definite at bin " +
                         std::to_string(f) + " (f=" +
                         format_double(bin_freqs[static_cast<size_t>(f)]) +
                         " Hz); increase diagonal loading");
    for (int p = 0; p < filter_count; ++p) {
      const Eigen::VectorXcd v =
          steering_vector(geom, bank.steer_angles[static_cast<size_t>(p)],
                          bin_freqs[static_cast<size_t>(f)]);
      const Eigen::VectorXcd x = llt.solve(v);  // Sigma^-1 v
      const cd denom = v.dot(x);                // v^H Sigma^-1 v, real positive
      if (!std::isfinite(denom.real()) || std::abs(denom) < 1e-300)
        throw NumericError("design_filterbank: singular coherence at bin " + std::to_string(f) +
                           "; increase diagonal loading");
      bank.weights[static_cast<size_t>(p)].row(f) = (x / denom).transpose();
    }
  }
  return bank;
}

cd array_response(const SpatialFilterBank& bank, int p, double theta, double freq_hz) {
  if (p < 0 || p >= bank.filter_count())
    throw InvalidInput("array_response: filter index out of range");
  int bin = -1;
  for (int f = 0; f < bank.bin_count(); ++f) {
    if (std::abs(bank.bin_freqs[static_cast<size_t>(f)] - freq_hz) < 1e-6) {
      bin = f;
      break;
    }
  }
  if (bin < 0) throw InvalidInput("array_response: frequency not in bank bins");
  const Eigen::VectorXcd v = steering_vector(bank.geometry, theta, freq_hz);
  // Eigen's dot conjugates its first operand, so this is w^H v.
  return bank.weights[static_cast<size_t>(p)].row(bin).dot(v);
}

namespace {
constexpr char kBankMagic[9] = "ASOBOFBK";
constexpr uint32_t kBankVersion = 1;
}  // namespace

void SpatialFilterBank::save(const std::string& path) const {
  BinWriter w(path);
  w.raw(kBankMagic, 8);
  w.u32(kBankVersion);
  w.u32(static_cast<uint32_t>(geometry.mic_count));
  w.f64(geometry.radius);
  w.f64(geometry.sound_speed);
  for (double a : geometry.mic_angles) w.f64(a);
  w.u32(static_cast<uint32_t>(filter_count()));
  for (double a : steer_angles) w.f64(a);
  w.u32(static_cast<uint32_t>(bin_count()));
  for (double f : bin_freqs) w.f64(f);
  w.f64(diag_loading);
  w.u32(static_cast<uint32_t>(noise_model));
  for (const auto& wp : weights) {
    for (int f = 0; f < wp.rows(); ++f) {
      for (int m = 0; m < wp.cols(); ++m) {
        w.f64(wp(f, m).real());
        w.f64(wp(f, m).imag());
      }
    }
  }
}

SpatialFilterBank SpatialFilterBank::load(const std::string& path) {
  BinReader r(path);
  char magic[8];
  r.raw(magic, 8);
  if (std::string(magic, 8) != std::string(kBankMagic, 8))
    throw InvalidInput("filter bank: bad magic in " + path);
  if (r.u32() != kBankVersion) throw InvalidInput("filter bank: unsupported version in " + path);

  SpatialFilterBank bank;
  bank.geometry.mic_count = static_cast<int>(r.u32());
  bank.geometry.radius = r.f64();
  bank.geometry.sound_speed = r.f64();
  bank.geometry.mic_angles.resize(static_cast<size_t>(bank.geometry.mic_count));
  for (auto& a : bank.geometry.mic_angles) a = r.f64();
  const uint32_t P = r.u32();
  bank.steer_angles.resize(P);
  for (auto& a : bank.steer_angles) a = r.f64();
  const uint32_t F = r.u32();
  bank.bin_freqs.resize(F);
  for (auto& f : bank.bin_freqs) f = r.f64();
  bank.diag_loading = r.f64();
  bank.noise_model = static_cast<NoiseModel>(r.u32());
  bank.weights.assign(P, Eigen::MatrixXcd(F, bank.geometry.mic_count));
  for (auto& wp : bank.weights) {
    for (uint32_t f = 0; f < F; ++f) {
      for (int m = 0; m < bank.geometry.mic_count; ++m) {
        const double re = r.f64();
        const double im = r.f64();
        wp(static_cast<int>(f), m) = cd(re, im);
      }
    }
  }
  bank.geometry.validate();
  return bank;
}

}  // namespace asobo
