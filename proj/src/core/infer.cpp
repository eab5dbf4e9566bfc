// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/infer.hpp"

#include <algorithm>

namespace asobo {

std::vector<std::pair<std::string, Eigen::MatrixXd*>> Model::tensors() {
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> out;
  visit([&](const std::string& name, Eigen::MatrixXd& t) { out.emplace_back(name, &t); });
  return out;
}

namespace {

// forward one window of power frames through SACC -> mel -> TCN
void window_forward(const PowerTensor& win, const Model& model, const MelFilterbank& mel,
                    Eigen::MatrixXd* probs, Eigen::MatrixXd* comb) {
  SaccOutput sacc = sacc_forward(win, model.sacc, nullptr);
  const Eigen::MatrixXd feats = mel_project(sacc.ybar, mel);
  const Eigen::MatrixXd logits = tcn_forward(feats, model.tcn, nullptr);
  *probs = softmax_rows(logits);
  *comb = std::move(sacc.comb);
}

}  // namespace

InferResult sliding_window_infer(const PowerTensor& ypow, const Model& model,
                                 const MelFilterbank& mel, int window_frames, int hop_frames) {
  const int T = ypow.frames;
  const int P = ypow.filters;
  if (T < 1) throw InvalidInput("sliding_window_infer: empty input");
  if (window_frames < 1 || hop_frames < 1)
    throw InvalidInput("sliding_window_infer: bad window/hop");

  const int C = model.tcn.cfg.num_classes;
  Eigen::MatrixXd prob_sum = Eigen::MatrixXd::Zero(T, C);
  Eigen::MatrixXd comb_sum = Eigen::MatrixXd::Zero(T, P);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(T);

  if (T <= window_frames) {
    // single window, zero-padded to full length
    PowerTensor win;
    win.frames = window_frames;
    win.filters = P;
    win.m = Eigen::MatrixXd::Zero(window_frames * P, ypow.bins());
    win.m.topRows(T * P) = ypow.m;
    Eigen::MatrixXd probs, comb;
    window_forward(win, model, mel, &probs, &comb);
    prob_sum = probs.topRows(T);
    comb_sum = comb.topRows(T);
    count.setOnes();
  } else {
    std::vector<int> starts;
    for (int s = 0; s + window_frames <= T; s += hop_frames) starts.push_back(s);
    if (starts.back() + window_frames < T) starts.push_back(T - window_frames);
    for (int s : starts) {
      PowerTensor win;
      win.frames = window_frames;
      win.filters = P;
      win.m = ypow.m.middleRows(s * P, window_frames * P);
      Eigen::MatrixXd probs, comb;
      window_forward(win, model, mel, &probs, &comb);
      prob_sum.middleRows(s, window_frames) += probs;
      comb_sum.middleRows(s, window_frames) += comb;
      count.segment(s, window_frames).array() += 1.0;
    }
  }

  InferResult res;
  res.posteriors.resize(T, C);
  res.weights.resize(T, P);
  for (int t = 0; t < T; ++t) {
    res.posteriors.row(t) = prob_sum.row(t) / count(t);
    res.posteriors.row(t) /= res.posteriors.row(t).sum();
    res.weights.row(t) = comb_sum.row(t) / count(t);
    res.weights.row(t) /= res.weights.row(t).sum();
  }
  return res;
}

VadOsd derive_vad_osd(const Eigen::MatrixXd& posteriors, double vad_threshold,
                      double osd_threshold) {
  if (vad_threshold < 0.0 || vad_threshold > 1.0 || osd_threshold < 0.0 || osd_threshold > 1.0)
    throw InvalidInput("derive_vad_osd: thresholds must lie in [0, 1]");
  if (posteriors.cols() < 3) throw InvalidInput("derive_vad_osd: need 3-class posteriors");
  const int T = static_cast<int>(posteriors.rows());
  VadOsd out;
  out.vad.resize(static_cast<size_t>(T));
  out.osd.resize(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    out.vad[static_cast<size_t>(t)] = posteriors(t, 1) + posteriors(t, 2) >= vad_threshold;
    out.osd[static_cast<size_t>(t)] = posteriors(t, 2) >= osd_threshold;
  }
  return out;
}

std::vector<bool> median_smooth(const std::vector<bool>& x, int window) {
  if (window <= 1) return x;
  if (window % 2 == 0) throw InvalidInput("median_smooth: window must be odd");
  const int n = static_cast<int>(x.size());
  const int half = window / 2;
  std::vector<bool> out(x.size());
  for (int i = 0; i < n; ++i) {
    int ones = 0, total = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      ones += x[static_cast<size_t>(j)] ? 1 : 0;
      ++total;
    }
    out[static_cast<size_t>(i)] = 2 * ones > total;
  }
  return out;
}

std::vector<Segment> frames_to_segments(const std::vector<bool>& frames, const StftConfig& cfg,
                                        const std::string& speaker) {
  std::vector<Segment> segs;
  const double hop_s = static_cast<double>(cfg.hop) / cfg.sample_rate;
  const int n = static_cast<int>(frames.size());
  int t = 0;
  while (t < n) {
    if (!frames[static_cast<size_t>(t)]) {
      ++t;
      continue;
    }
    int e = t;
    while (e + 1 < n && frames[static_cast<size_t>(e) + 1]) ++e;
    Segment s;
    s.onset = cfg.frame_center_seconds(t);
    s.duration = cfg.frame_center_seconds(e) + hop_s - s.onset;
    s.speaker = speaker;
    segs.push_back(s);
    t = e + 1;
  }
  return segs;
}

std::vector<bool> segments_to_frames(const std::vector<Segment>& segments, int frame_count,
                                     const StftConfig& cfg) {
  std::vector<bool> frames(static_cast<size_t>(frame_count), false);
  for (const auto& s : segments) {
    for (int t = 0; t < frame_count; ++t) {
      const double c = cfg.frame_center_seconds(t);
      if (c >= s.onset && c < s.onset + s.duration) frames[static_cast<size_t>(t)] = true;
    }
  }
  return frames;
}

}  // namespace asobo
