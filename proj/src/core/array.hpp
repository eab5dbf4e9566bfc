// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Uniform-circular-array geometry, steering vectors, diffuse-noise coherence
// and the super-directive fixed filter bank.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace asobo {

struct ArrayGeometry {
  int mic_count = 0;
  double radius = 0.0;                // meters
  std::vector<double> mic_angles;     // radians, strictly increasing in [0, 2pi)
  double sound_speed = 343.0;         // m/s

  static ArrayGeometry uniform_circular(int mics, double radius, double sound_speed = 343.0);

  void validate() const;

  // Mic position in the horizontal plane of `center`.
  Eigen::Vector3d mic_position(int m, const Eigen::Vector3d& center) const;

  bool operator==(const ArrayGeometry&) const = default;
};

// Element m: exp(j*2*pi*f*r/c * cos(theta - psi_m)). Unit magnitude per element.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta, double freq_hz);

// Spherically isotropic (diffuse) field: entry (i,j) = sinc(2*pi*f*d_ij/c),
// sinc(x) = sin(x)/x, plus `loading` on the diagonal.
Eigen::MatrixXd diffuse_noise_coherence(const ArrayGeometry& geom, double freq_hz,
                                        double loading);

enum class NoiseModel { kDiffuse = 0, kIdentity = 1 };

struct SpatialFilterBank {
  ArrayGeometry geometry;
  std::vector<double> steer_angles;   // radians, theta_p = 2*pi*p/P
  std::vector<double> bin_freqs;      // Hz
  double diag_loading = 0.0;
  NoiseModel noise_model = NoiseModel::kDiffuse;
  // weights[p] is F x M; row f holds w_p(f).
  std::vector<Eigen::MatrixXcd> weights;

  int filter_count() const { return static_cast<int>(steer_angles.size()); }
  int bin_count() const { return static_cast<int>(bin_freqs.size()); }

  void save(const std::string& path) const;
  static SpatialFilterBank load(const std::string& path);
};

// Eq.-style MVDR solution against the fixed noise model:
//   w_p(f) = Sigma^-1 v_p / (v_p^H Sigma^-1 v_p)
// solved per bin by Cholesky. Throws NumericError naming the failing bin when
// the loaded coherence is not positive definite.
SpatialFilterBank design_filterbank(const ArrayGeometry& geom, int filter_count,
                                    const std::vector<double>& bin_freqs, double diag_loading,
                                    NoiseModel noise_model = NoiseModel::kDiffuse);

// w_p(f)^H v(theta, f). `freq_hz` must match a bank bin.
cd array_response(const SpatialFilterBank& bank, int p, double theta, double freq_hz);

}  // namespace asobo
