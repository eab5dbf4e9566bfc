// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Sliding-window inference over a whole file and the mapping from class
// posteriors to VAD/OSD frame decisions and segments.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/dsp.hpp"
#include "core/sacc.hpp"
#include "core/tcn.hpp"

namespace asobo {

struct Model {
  SaccParams sacc;
  TcnModel tcn;

  template <class Fn>
  void visit(Fn&& fn) {
    sacc.visit(fn);
    tcn.visit(fn);
  }

  std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
};

struct InferResult {
  Eigen::MatrixXd posteriors;  // T x classes, rows sum to 1
  Eigen::MatrixXd weights;     // T x P combination-weight map, rows sum to 1
};

// Posteriors and attention weights averaged over every window covering each
// frame, then renormalized. Inputs shorter than one window are zero-padded to
// a single window.
InferResult sliding_window_infer(const PowerTensor& ypow, const Model& model,
                                 const MelFilterbank& mel, int window_frames, int hop_frames);

struct VadOsd {
  std::vector<bool> vad;
  std::vector<bool> osd;
};

// vad = p1 + p2 >= vad_threshold; osd = p2 >= osd_threshold.
VadOsd derive_vad_osd(const Eigen::MatrixXd& posteriors, double vad_threshold = 0.5,
                      double osd_threshold = 0.5);

std::vector<bool> median_smooth(const std::vector<bool>& x, int window);

struct Segment {
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds
  std::string speaker;
};

// Runs of active frames become segments [center(first), center(last) + hop),
// where center(t) = t*hop + frame/2 in seconds. frames_to_segments and
// segments_to_frames are exact inverses on the frame grid.
std::vector<Segment> frames_to_segments(const std::vector<bool>& frames, const StftConfig& cfg,
                                        const std::string& speaker);
std::vector<bool> segments_to_frames(const std::vector<Segment>& segments, int frame_count,
                                     const StftConfig& cfg);

}  // namespace asobo
