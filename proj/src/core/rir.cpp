// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/rir.hpp"

#include <cmath>

#include "core/dsp.hpp"

namespace asobo {

namespace {
constexpr int kSincHalf = 40;  // 81-tap windowed sinc

double norm_sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Hann-windowed sinc centered at fractional `delay`.
void place_impulse(std::vector<double>& h, double delay, double amplitude) {
  const int lo = std::max(0, static_cast<int>(std::ceil(delay)) - kSincHalf);
  const int hi = std::min(static_cast<int>(h.size()) - 1,
                          static_cast<int>(std::floor(delay)) + kSincHalf);
  for (int n = lo; n <= hi; ++n) {
    const double x = n - delay;
    const double w = 0.5 * (1.0 + std::cos(kPi * x / (kSincHalf + 1)));
    h[static_cast<size_t>(n)] += amplitude * norm_sinc(x) * w;
  }
}

}  // namespace

void RoomConfig::validate() const {
  if (size.minCoeff() <= 0.0) throw InvalidInput("room: dimensions must be positive");
  if (t60 < 0.0) throw InvalidInput("room: T60 must be nonnegative");
  if (max_reflection_order < 0) throw InvalidInput("room: bad reflection order");
  if (sample_rate <= 0) throw InvalidInput("room: bad sample rate");
  if (t60 > 0.0 && wall_absorption() >= 1.0)
    throw InvalidInput("room: T60 unachievable for this room size (Sabine absorption >= 1)");
}

bool RoomConfig::inside(const Eigen::Vector3d& p, double margin) const {
  for (int i = 0; i < 3; ++i)
    if (p(i) <= margin || p(i) >= size(i) - margin) return false;
  return true;
}

double RoomConfig::wall_absorption() const {
  if (t60 <= 0.0) return 1.0;
  const double volume = size.prod();
  const double surface =
      2.0 * (size(0) * size(1) + size(0) * size(2) + size(1) * size(2));
  return 0.161 * volume / (surface * t60);
}

std::vector<double> simulate_rir(const RoomConfig& room, const Eigen::Vector3d& source_pos,
                                 const Eigen::Vector3d& mic_pos) {
  room.validate();
  if (!room.inside(source_pos) || !room.inside(mic_pos))
    throw InvalidInput("simulate_rir: source/mic outside the room");
  const double direct = (source_pos - mic_pos).norm();
  if (direct < 1e-9) throw InvalidInput("simulate_rir: source coincides with microphone");

  const double c = room.geometry.sound_speed > 0.0 ? room.geometry.sound_speed : 343.0;
  const double fs = room.sample_rate;
  const double tail_s = room.t60;
  const int length = static_cast<int>(std::ceil((direct / c + tail_s) * fs)) + kSincHalf + 2;
  std::vector<double> h(static_cast<size_t>(length), 0.0);

  if (room.t60 <= 0.0) {
    place_impulse(h, direct / c * fs, 1.0 / (4.0 * kPi * direct));
    return h;
  }

  const double beta = std::sqrt(1.0 - room.wall_absorption());
  const double max_dist = c * (static_cast<double>(length) / fs);
  int nmax[3];
  for (int i = 0; i < 3; ++i)
    nmax[i] = static_cast<int>(std::ceil(max_dist / (2.0 * room.size(i)))) + 1;

  for (int qx = 0; qx <= 1; ++qx) {
    for (int qy = 0; qy <= 1; ++qy) {
      for (int qz = 0; qz <= 1; ++qz) {
        for (int nx = -nmax[0]; nx <= nmax[0]; ++nx) {
          for (int ny = -nmax[1]; ny <= nmax[1]; ++ny) {
            for (int nz = -nmax[2]; nz <= nmax[2]; ++nz) {
              const int hits = std::abs(nx - qx) + std::abs(nx) + std::abs(ny - qy) +
                               std::abs(ny) + std::abs(nz - qz) + std::abs(nz);
              if (hits > room.max_reflection_order) continue;
              const Eigen::Vector3d img(
                  (1 - 2 * qx) * source_pos(0) + 2.0 * nx * room.size(0),
                  (1 - 2 * qy) * source_pos(1) + 2.0 * ny * room.size(1),
                  (1 - 2 * qz) * source_pos(2) + 2.0 * nz * room.size(2));
              const double d = (img - mic_pos).norm();
              if (d < 1e-9) continue;
              const double delay = d / c * fs;
              if (delay >= length - 1) continue;
              place_impulse(h, delay, std::pow(beta, hits) / (4.0 * kPi * d));
            }
          }
        }
      }
    }
  }
  return h;
}

Eigen::MatrixXd spatialize(const std::vector<PlacedSource>& sources,
                           const std::vector<std::vector<std::vector<double>>>& rirs) {
  if (sources.empty()) throw InvalidInput("spatialize: no sources");
  if (rirs.size() != sources.size())
    throw InvalidInput("spatialize: need one RIR set per source");
  const size_t mics = rirs[0].size();
  if (mics == 0) throw InvalidInput("spatialize: no microphones");

  int64_t total = 0;
  for (size_t s = 0; s < sources.size(); ++s) {
    if (rirs[s].size() != mics) throw InvalidInput("spatialize: ragged RIR set");
    if (sources[s].onset_samples < 0) throw InvalidInput("spatialize: negative onset");
    for (const auto& r : rirs[s]) {
      const int64_t len = sources[s].onset_samples +
                          static_cast<int64_t>(sources[s].wave.size()) +
                          static_cast<int64_t>(r.size()) - 1;
      total = std::max(total, len);
    }
  }
  if (total <= 0 || total > (int64_t{1} << 31))
    throw InvalidInput("spatialize: output length overflow");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<int>(mics), total);
  for (size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].wave.empty()) continue;
    for (size_t m = 0; m < mics; ++m) {
      const auto y = fft_convolve(sources[s].wave, rirs[s][m]);
      for (size_t i = 0; i < y.size(); ++i)
        out(static_cast<int>(m), sources[s].onset_samples + static_cast<int64_t>(i)) += y[i];
    }
  }
  const double peak = out.cwiseAbs().maxCoeff();
  if (peak > 1.0) out *= 0.9 / peak;
  return out;
}

}  // namespace asobo
