// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/tcn.hpp"

#include <cmath>

namespace asobo {

namespace {
constexpr double kLnEps = 1e-5;

// out += sum_k W_k * shift(in, (k - c)*d), zero-padded
void conv_same(const Eigen::MatrixXd& w, int kernel, int dilation, const Eigen::MatrixXd& in,
               Eigen::MatrixXd& out) {
  const int H = static_cast<int>(in.rows());
  const int T = static_cast<int>(in.cols());
  const int c = (kernel - 1) / 2;
  for (int k = 0; k < kernel; ++k) {
    const int s = (k - c) * dilation;
    const int a = std::max(0, -s);
    const int len = T - std::abs(s);
    if (len <= 0) continue;
    out.middleCols(a, len).noalias() += w.middleCols(k * H, H) * in.middleCols(a + s, len);
  }
}

}  // namespace

void TcnConfig::validate() const {
  if (in_dim < 1 || blocks < 1 || layers_per_block < 1 || hidden < 1 || num_classes < 2)
    throw InvalidInput("tcn: bad configuration");
  if (kernel < 1 || kernel % 2 == 0) throw InvalidInput("tcn: kernel size must be odd");
}

TcnModel TcnModel::init(const TcnConfig& cfg, Rng& rng) {
  cfg.validate();
  TcnModel m;
  m.cfg = cfg;
  auto fill = [&](Eigen::MatrixXd& w, int r, int c, double fan_in) {
    const double scale = std::sqrt(1.0 / fan_in);
    w.resize(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) w(i, j) = rng.uniform(-scale, scale);
  };
  fill(m.in_w, cfg.hidden, cfg.in_dim, cfg.in_dim);
  m.in_b = Eigen::MatrixXd::Zero(cfg.hidden, 1);
  const int n_layers = cfg.blocks * cfg.layers_per_block;
  m.layers.resize(static_cast<size_t>(n_layers));
  for (int i = 0; i < n_layers; ++i) {
    auto& l = m.layers[static_cast<size_t>(i)];
    fill(l.w, cfg.hidden, cfg.hidden * cfg.kernel, static_cast<double>(cfg.hidden) * cfg.kernel);
    l.b = Eigen::MatrixXd::Zero(cfg.hidden, 1);
    l.gamma = Eigen::MatrixXd::Ones(cfg.hidden, 1);
    l.beta = Eigen::MatrixXd::Zero(cfg.hidden, 1);
    l.dilation = 1 << (i % cfg.layers_per_block);
  }
  fill(m.out_w, cfg.num_classes, cfg.hidden, cfg.hidden);
  m.out_b = Eigen::MatrixXd::Zero(cfg.num_classes, 1);
  return m;
}

TcnModel TcnModel::zeros_like(const TcnModel& src) {
  TcnModel z = src;
  z.visit([](const std::string&, Eigen::MatrixXd& t) { t.setZero(); });
  return z;
}

Eigen::MatrixXd tcn_forward(const Eigen::MatrixXd& feats, const TcnModel& model, TcnCache* cache) {
  const auto& cfg = model.cfg;
  if (feats.cols() != cfg.in_dim)
    throw InvalidInput("tcn_forward: expected " + std::to_string(cfg.in_dim) +
                       "-dim features, got " + std::to_string(feats.cols()));
  const int T = static_cast<int>(feats.rows());
  if (T < 1) throw InvalidInput("tcn_forward: empty feature sequence");

  const Eigen::MatrixXd feats_t = feats.transpose();  // in_dim x T
  Eigen::MatrixXd x = model.in_w * feats_t;           // hidden x T
  x.colwise() += model.in_b.col(0);

  const int n_layers = cfg.blocks * cfg.layers_per_block;
  if (cache) {
    cache->layer_in.assign(static_cast<size_t>(n_layers), {});
    cache->xhat.assign(static_cast<size_t>(n_layers), {});
    cache->inv_std.assign(static_cast<size_t>(n_layers), {});
    cache->relu_mask.assign(static_cast<size_t>(n_layers), {});
    cache->block_in.assign(static_cast<size_t>(cfg.blocks), {});
    cache->feats_t = feats_t;
    cache->frames = T;
  }

  int li = 0;
  for (int blk = 0; blk < cfg.blocks; ++blk) {
    const Eigen::MatrixXd block_in = x;
    if (cache) cache->block_in[static_cast<size_t>(blk)] = block_in;
    for (int l = 0; l < cfg.layers_per_block; ++l, ++li) {
      const auto& layer = model.layers[static_cast<size_t>(li)];
      if (cache) cache->layer_in[static_cast<size_t>(li)] = x;

      Eigen::MatrixXd z = Eigen::MatrixXd::Zero(cfg.hidden, T);
      z.colwise() += layer.b.col(0);
      conv_same(layer.w, cfg.kernel, layer.dilation, x, z);

      // per-frame layer norm over channels
      Eigen::MatrixXd xhat(cfg.hidden, T);
      Eigen::VectorXd inv_std(T);
      for (int t = 0; t < T; ++t) {
        const double mu = z.col(t).mean();
        const double var = (z.col(t).array() - mu).square().mean();
        const double istd = 1.0 / std::sqrt(var + kLnEps);
        xhat.col(t) = (z.col(t).array() - mu) * istd;
        inv_std(t) = istd;
      }
      Eigen::MatrixXd y = (xhat.array().colwise() * layer.gamma.col(0).array()).matrix();
      y.colwise() += layer.beta.col(0);

      const Eigen::MatrixXd mask = (y.array() > 0.0).cast<double>();
      x = y.cwiseProduct(mask);

      if (cache) {
        cache->xhat[static_cast<size_t>(li)] = std::move(xhat);
        cache->inv_std[static_cast<size_t>(li)] = std::move(inv_std);
        cache->relu_mask[static_cast<size_t>(li)] = mask;
      }
    }
    x += block_in;  // residual
  }

  if (cache) cache->last = x;
  Eigen::MatrixXd logits = (model.out_w * x).colwise() + model.out_b.col(0);
  return logits.transpose();  // T x classes
}

Eigen::MatrixXd tcn_backward(const TcnModel& model, const TcnCache& cache,
                             const Eigen::MatrixXd& dlogits, TcnModel* grads) {
  const auto& cfg = model.cfg;
  const int T = cache.frames;
  if (dlogits.rows() != T || dlogits.cols() != cfg.num_classes)
    throw InvalidInput("tcn_backward: gradient shape mismatch");

  const Eigen::MatrixXd dlog_t = dlogits.transpose();  // classes x T
  grads->out_w += dlog_t * cache.last.transpose();
  grads->out_b += dlog_t.rowwise().sum();
  Eigen::MatrixXd dx = model.out_w.transpose() * dlog_t;  // hidden x T

  int li = cfg.blocks * cfg.layers_per_block - 1;
  for (int blk = cfg.blocks - 1; blk >= 0; --blk) {
    const Eigen::MatrixXd dblock_out = dx;  // gradient entering the residual sum
    for (int l = cfg.layers_per_block - 1; l >= 0; --l, --li) {
      const auto& layer = model.layers[static_cast<size_t>(li)];
      auto& glayer = grads->layers[static_cast<size_t>(li)];
      const auto& xhat = cache.xhat[static_cast<size_t>(li)];
      const auto& istd = cache.inv_std[static_cast<size_t>(li)];
      const auto& mask = cache.relu_mask[static_cast<size_t>(li)];
      const auto& in = cache.layer_in[static_cast<size_t>(li)];

      const Eigen::MatrixXd dy = dx.cwiseProduct(mask);  // relu

      glayer.gamma += dy.cwiseProduct(xhat).rowwise().sum();
      glayer.beta += dy.rowwise().sum();

      // layer norm backward, per frame
      Eigen::MatrixXd dz(cfg.hidden, T);
      const Eigen::MatrixXd dxhat = (dy.array().colwise() * layer.gamma.col(0).array()).matrix();
      for (int t = 0; t < T; ++t) {
        const double m1 = dxhat.col(t).mean();
        const double m2 = dxhat.col(t).cwiseProduct(xhat.col(t)).mean();
        dz.col(t) = istd(t) * (dxhat.col(t).array() - m1 - xhat.col(t).array() * m2);
      }

      // conv backward
      glayer.b += dz.rowwise().sum();
      Eigen::MatrixXd din = Eigen::MatrixXd::Zero(cfg.hidden, T);
      const int c = (cfg.kernel - 1) / 2;
      for (int k = 0; k < cfg.kernel; ++k) {
        const int s = (k - c) * layer.dilation;
        const int a = std::max(0, -s);
        const int len = T - std::abs(s);
        if (len <= 0) continue;
        glayer.w.middleCols(k * cfg.hidden, cfg.hidden).noalias() +=
            dz.middleCols(a, len) * in.middleCols(a + s, len).transpose();
        din.middleCols(a + s, len).noalias() +=
            layer.w.middleCols(k * cfg.hidden, cfg.hidden).transpose() * dz.middleCols(a, len);
      }
      dx = din;
    }
    dx += dblock_out;  // residual path
  }

  grads->in_w += dx * cache.feats_t.transpose();
  grads->in_b += dx.rowwise().sum();
  return (model.in_w.transpose() * dx).transpose();  // T x in_dim
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (int t = 0; t < logits.rows(); ++t) {
    const double mx = logits.row(t).maxCoeff();
    Eigen::ArrayXd e = (logits.row(t).array() - mx).exp();
    out.row(t) = (e / e.sum()).matrix();
  }
  return out;
}

double cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                     Eigen::MatrixXd* dlogits) {
  const int T = static_cast<int>(logits.rows());
  const int C = static_cast<int>(logits.cols());
  if (static_cast<int>(labels.size()) != T)
    throw InvalidInput("cross_entropy: label/logit length mismatch");
  for (int y : labels)
    if (y < 0 || y >= C) throw InvalidInput("cross_entropy: label out of range");

  double loss = 0.0;
  Eigen::MatrixXd probs = softmax_rows(logits);
  for (int t = 0; t < T; ++t) {
    const double mx = logits.row(t).maxCoeff();
    const double lse = mx + std::log((logits.row(t).array() - mx).exp().sum());
    loss += lse - logits(t, labels[static_cast<size_t>(t)]);
  }
  loss /= T;
  if (dlogits) {
    *dlogits = probs;
    for (int t = 0; t < T; ++t) (*dlogits)(t, labels[static_cast<size_t>(t)]) -= 1.0;
    *dlogits /= static_cast<double>(T);
  }
  return loss;
}

void adam_step(const std::vector<std::pair<std::string, Eigen::MatrixXd*>>& params,
               const std::vector<const Eigen::MatrixXd*>& grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw InvalidInput("adam: param/grad count mismatch");
  if (state.m.empty()) {
    for (const auto& [name, p] : params) {
      state.m.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      state.v.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw InvalidInput("adam: state does not match params");

  for (size_t i = 0; i < params.size(); ++i) {
    if (!grads[i]->allFinite())
      throw NumericError("adam: non-finite gradient in " + params[i].first + " at step " +
                         std::to_string(state.step + 1));
    if (grads[i]->rows() != params[i].second->rows() ||
        grads[i]->cols() != params[i].second->cols())
      throw InvalidInput("adam: gradient shape mismatch for " + params[i].first);
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = *grads[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd mhat = m.array() / bc1;
    const Eigen::ArrayXXd vhat = v.array() / bc2;
    params[i].second->array() -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
  }
}

}  // namespace asobo
