// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// 3-class frame classifier: input projection, 3 residual blocks of 5 dilated
// 1-D convolutions (dilation 2^k, symmetric same padding), per-frame layer
// normalization over channels, ReLU, linear output head. Forward/backward are
// hand-written; gradients are exact.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/common.hpp"

namespace asobo {

struct TcnConfig {
  int in_dim = 64;
  int blocks = 3;
  int layers_per_block = 5;
  int kernel = 3;  // odd
  int hidden = 64;
  int num_classes = 3;

  // 1 + blocks * (kernel-1) * (2^layers - 1) frames
  int receptive_field() const {
    return 1 + blocks * (kernel - 1) * ((1 << layers_per_block) - 1);
  }
  void validate() const;
};

struct TcnConvLayer {
  // taps stored side by side: w.block(0, k*hidden, hidden, hidden) is tap k
  Eigen::MatrixXd w;            // hidden x hidden*kernel
  Eigen::MatrixXd b;            // hidden x 1
  Eigen::MatrixXd gamma, beta;  // hidden x 1 layer-norm affine
  int dilation = 1;
};

struct TcnModel {
  TcnConfig cfg;
  Eigen::MatrixXd in_w, in_b;    // hidden x in_dim, hidden x 1
  std::vector<TcnConvLayer> layers;
  Eigen::MatrixXd out_w, out_b;  // classes x hidden, classes x 1

  static TcnModel init(const TcnConfig& cfg, Rng& rng);
  static TcnModel zeros_like(const TcnModel& m);

  template <class Fn>
  void visit(Fn&& fn) {
    fn("tcn.in_w", in_w);
    fn("tcn.in_b", in_b);
    for (size_t i = 0; i < layers.size(); ++i) {
      const std::string base = "tcn.layer" + std::to_string(i);
      fn(base + ".w", layers[i].w);
      fn(base + ".b", layers[i].b);
      fn(base + ".gamma", layers[i].gamma);
      fn(base + ".beta", layers[i].beta);
    }
    fn("tcn.out_w", out_w);
    fn("tcn.out_b", out_b);
  }
};

struct TcnCache {
  // per conv layer: input activation, normalized pre-affine, inverse std, relu mask
  std::vector<Eigen::MatrixXd> layer_in;   // hidden x T
  std::vector<Eigen::MatrixXd> xhat;       // hidden x T
  std::vector<Eigen::VectorXd> inv_std;    // T
  std::vector<Eigen::MatrixXd> relu_mask;  // hidden x T (0/1)
  std::vector<Eigen::MatrixXd> block_in;   // hidden x T per block
  Eigen::MatrixXd feats_t;                 // in_dim x T (input, transposed)
  Eigen::MatrixXd last;                    // hidden x T, head input
  int frames = 0;
};

// feats: T x in_dim. Returns logits T x classes.
Eigen::MatrixXd tcn_forward(const Eigen::MatrixXd& feats, const TcnModel& model, TcnCache* cache);

// Returns dL/dfeats (T x in_dim); parameter gradients accumulate into *grads.
Eigen::MatrixXd tcn_backward(const TcnModel& model, const TcnCache& cache,
                             const Eigen::MatrixXd& dlogits, TcnModel* grads);

// Mean over frames of -log softmax(logits)[label]; dlogits = (softmax-onehot)/T.
double cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                     Eigen::MatrixXd* dlogits);

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m, v;
  int64_t step = 0;
};

// Standard bias-corrected Adam over a fixed tensor ordering. Throws
// NumericError (naming the tensor) on non-finite gradients; parameters are
// left untouched in that case.
void adam_step(const std::vector<std::pair<std::string, Eigen::MatrixXd*>>& params,
               const std::vector<const Eigen::MatrixXd*>& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace asobo
