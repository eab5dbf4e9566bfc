// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/sacc.hpp"

#include <cmath>

namespace asobo {

SaccParams SaccParams::init(int bins, int hidden, Rng& rng) {
  SaccParams p;
  const double scale = std::sqrt(1.0 / bins);
  auto fill = [&](Eigen::MatrixXd& m, int r, int c) {
    m.resize(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = rng.uniform(-scale, scale);
  };
  fill(p.Wq, bins, hidden);
  fill(p.Wk, bins, hidden);
  fill(p.Wv, bins, 1);
  p.bq = Eigen::MatrixXd::Zero(hidden, 1);
  p.bk = Eigen::MatrixXd::Zero(hidden, 1);
  p.bv = Eigen::MatrixXd::Zero(1, 1);
  return p;
}

SaccParams SaccParams::zeros_like(const SaccParams& p) {
  SaccParams z;
  z.Wq = Eigen::MatrixXd::Zero(p.Wq.rows(), p.Wq.cols());
  z.Wk = Eigen::MatrixXd::Zero(p.Wk.rows(), p.Wk.cols());
  z.Wv = Eigen::MatrixXd::Zero(p.Wv.rows(), p.Wv.cols());
  z.bq = Eigen::MatrixXd::Zero(p.bq.rows(), 1);
  z.bk = Eigen::MatrixXd::Zero(p.bk.rows(), 1);
  z.bv = Eigen::MatrixXd::Zero(1, 1);
  return z;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& x) {
  Eigen::VectorXd e = (x.array() - x.maxCoeff()).exp();
  return e / e.sum();
}

SaccOutput sacc_forward(const PowerTensor& ypow, const SaccParams& params, SaccCache* cache) {
  const int T = ypow.frames;
  const int P = ypow.filters;
  const int F = ypow.bins();
  if (P < 1 || T < 1) throw InvalidInput("sacc_forward: empty input");
  if (F != params.feat_bins())
    throw InvalidInput("sacc_forward: bin count mismatch (" + std::to_string(F) + " vs " +
                       std::to_string(params.feat_bins()) + ")");
  const int D = params.hidden();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(D));

  // batched projections over all frames
  Eigen::MatrixXd Q = ypow.m * params.Wq;  // (T*P) x D
  Q.rowwise() += params.bq.col(0).transpose();
  Eigen::MatrixXd K = ypow.m * params.Wk;
  K.rowwise() += params.bk.col(0).transpose();
  Eigen::MatrixXd V = ypow.m * params.Wv;
  V.array() += params.bv(0, 0);

  Eigen::MatrixXd A(T * P, P);
  Eigen::MatrixXd wsa(T, P);
  Eigen::MatrixXd comb(T, P);
  Eigen::MatrixXd ybar(T, F);

  for (int t = 0; t < T; ++t) {
    const auto Qt = Q.middleRows(t * P, P);
    const auto Kt = K.middleRows(t * P, P);
    const auto Vt = V.middleRows(t * P, P);
    Eigen::MatrixXd Z = Qt * Kt.transpose() * inv_sqrt_d;  // P x P
    for (int i = 0; i < P; ++i)
      A.row(t * P + i) = softmax(Z.row(i).transpose()).transpose();
    const Eigen::VectorXd w = A.middleRows(t * P, P) * Vt.col(0);
    wsa.row(t) = w.transpose();
    const Eigen::VectorXd u = softmax(w);
    comb.row(t) = u.transpose();
    ybar.row(t) = u.transpose() * ypow.frame(t);
  }

  if (cache) {
    cache->Q = std::move(Q);
    cache->K = std::move(K);
    cache->V = std::move(V);
    cache->A = std::move(A);
    cache->wsa = wsa;
    cache->comb = comb;
    cache->frames = T;
    cache->filters = P;
  }
  return SaccOutput{std::move(ybar), std::move(wsa), std::move(comb)};
}

void sacc_backward(const PowerTensor& ypow, const SaccParams& params, const SaccCache& cache,
                   const Eigen::MatrixXd& dybar, SaccParams* grads) {
  const int T = ypow.frames;
  const int P = ypow.filters;
  if (cache.frames != T || cache.filters != P)
    throw InvalidInput("sacc_backward: cache does not match input");
  if (dybar.rows() != T || dybar.cols() != ypow.bins())
    throw InvalidInput("sacc_backward: upstream gradient shape mismatch");
  const int D = params.hidden();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(D));

  Eigen::MatrixXd dQ(T * P, D), dK(T * P, D), dV(T * P, 1);
  for (int t = 0; t < T; ++t) {
    const auto Yt = ypow.frame(t);                       // P x F
    const auto At = cache.A.middleRows(t * P, P);        // P x P
    const auto Qt = cache.Q.middleRows(t * P, P);
    const auto Kt = cache.K.middleRows(t * P, P);
    const Eigen::VectorXd u = cache.comb.row(t).transpose();

    // ybar_t = sum_p u_p Y_t[p,:]
    const Eigen::VectorXd du = Yt * dybar.row(t).transpose();  // P
    const double udu = u.dot(du);
    const Eigen::VectorXd dw = u.array() * (du.array() - udu);  // softmax over channels

    dV.middleRows(t * P, P) = At.transpose() * dw;
    const Eigen::MatrixXd dA = dw * cache.V.middleRows(t * P, P).transpose();  // P x P

    Eigen::MatrixXd dZ(P, P);  // row-wise softmax backward
    for (int i = 0; i < P; ++i) {
      const Eigen::RowVectorXd ai = At.row(i);
      const double s = ai.dot(dA.row(i));
      dZ.row(i) = ai.array() * (dA.row(i).array() - s);
    }
    dZ *= inv_sqrt_d;
    dQ.middleRows(t * P, P) = dZ * Kt;
    dK.middleRows(t * P, P) = dZ.transpose() * Qt;
  }

  grads->Wq += ypow.m.transpose() * dQ;
  grads->Wk += ypow.m.transpose() * dK;
  grads->Wv += ypow.m.transpose() * dV;
  grads->bq += dQ.colwise().sum().transpose();
  grads->bk += dK.colwise().sum().transpose();
  grads->bv(0, 0) += dV.sum();
}

Eigen::MatrixXd extract_weights(const Eigen::MatrixXd& wsa) {
  Eigen::MatrixXd out(wsa.rows(), wsa.cols());
  for (int t = 0; t < wsa.rows(); ++t)
    out.row(t) = softmax(wsa.row(t).transpose()).transpose();
  return out;
}

}  // namespace asobo
