// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Image-source room impulse responses on a shoebox room with
// frequency-independent wall absorption derived from T60 via Sabine, and
// fractional-delay (windowed-sinc) sample placement.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/array.hpp"
#include "core/common.hpp"

namespace asobo {

struct RoomConfig {
  Eigen::Vector3d size{6.0, 5.0, 3.0};          // meters
  double t60 = 0.6;                             // seconds, 0 = anechoic
  Eigen::Vector3d array_center{3.0, 2.5, 1.2};  // meters
  ArrayGeometry geometry;
  int max_reflection_order = 64;  // cap on total wall hits per image
  int sample_rate = 16000;

  void validate() const;
  bool inside(const Eigen::Vector3d& p, double margin = 0.0) const;
  // Sabine: alpha = 0.161 V / (S T60)
  double wall_absorption() const;
};

// Impulse response from source_pos to mic_pos at room.sample_rate. Direct path
// amplitude 1/(4 pi d); reflections attenuate by sqrt(1-alpha) per wall hit;
// truncated at max_reflection_order and at the T60-implied length.
std::vector<double> simulate_rir(const RoomConfig& room, const Eigen::Vector3d& source_pos,
                                 const Eigen::Vector3d& mic_pos);

struct PlacedSource {
  std::vector<double> wave;  // mono, room.sample_rate
  int64_t onset_samples = 0;
};

// channel m = sum over sources of conv(source, rir[source][m]) shifted by the
// source onset; peak-normalized to 0.9 only if the mix would clip.
Eigen::MatrixXd spatialize(const std::vector<PlacedSource>& sources,
                           const std::vector<std::vector<std::vector<double>>>& rirs);

}  // namespace asobo
