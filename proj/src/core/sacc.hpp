// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Self-attention channel combinator over beamformer power spectra. Per frame,
// the P channel spectra are projected to queries/keys/values, scaled
// dot-product attention yields one score per channel, and a softmax over
// channels produces the scalar combination weights applied to all bins.
// Forward keeps the intermediates needed for the exact analytic backward.

#pragma once

#include <Eigen/Dense>

#include "core/common.hpp"
#include "core/dsp.hpp"

namespace asobo {

struct SaccParams {
  Eigen::MatrixXd Wq, Wk;  // F x D
  Eigen::MatrixXd Wv;      // F x 1
  Eigen::MatrixXd bq, bk;  // D x 1
  Eigen::MatrixXd bv;      // 1 x 1

  int feat_bins() const { return static_cast<int>(Wq.rows()); }
  int hidden() const { return static_cast<int>(Wq.cols()); }

  // Projection matrices uniform in +-sqrt(1/F), biases zero.
  static SaccParams init(int bins, int hidden, Rng& rng);
  static SaccParams zeros_like(const SaccParams& p);

  template <class Fn>
  void visit(Fn&& fn) {
    fn("sacc.Wq", Wq);
    fn("sacc.Wk", Wk);
    fn("sacc.Wv", Wv);
    fn("sacc.bq", bq);
    fn("sacc.bk", bk);
    fn("sacc.bv", bv);
  }
};

struct SaccCache {
  Eigen::MatrixXd Q, K, V;  // (T*P) x D, (T*P) x D, (T*P) x 1
  Eigen::MatrixXd A;        // (T*P) x P, attention rows per frame
  Eigen::MatrixXd wsa;      // T x P, pre-softmax combination scores
  Eigen::MatrixXd comb;     // T x P, post-softmax combination weights
  int frames = 0;
  int filters = 0;
};

struct SaccOutput {
  Eigen::MatrixXd ybar;  // T x F combined power spectrum
  Eigen::MatrixXd wsa;   // T x P
  Eigen::MatrixXd comb;  // T x P, rows sum to 1
};

// cache may be null when no backward pass will follow.
SaccOutput sacc_forward(const PowerTensor& ypow, const SaccParams& params, SaccCache* cache);

// Exact gradients of a scalar loss wrt all parameters given dL/dYbar.
void sacc_backward(const PowerTensor& ypow, const SaccParams& params, const SaccCache& cache,
                   const Eigen::MatrixXd& dybar, SaccParams* grads);

// Row-wise softmax of the combination scores.
Eigen::MatrixXd extract_weights(const Eigen::MatrixXd& wsa);

Eigen::VectorXd softmax(const Eigen::VectorXd& x);

}  // namespace asobo
