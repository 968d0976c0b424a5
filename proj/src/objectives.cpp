// src/objectives.cpp

// Copyright 2026 The maskfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskfuse/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace maskfuse {

LossValue mse_irm_loss(const Grid<double>& pred, const Grid<double>& target) {
  require_same_shape(pred, target, "mse_irm_loss");
  LossValue out{0.0, Grid<double>(pred.rows(), pred.cols())};
  const auto& p = pred.values();
  const auto& y = target.values();
  auto& g = out.grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - y[i];
    out.loss += d * d;
    g[i] = 2.0 * d;
  }
  return out;
}

LossValue bce_tbm_loss(const Grid<double>& pred, const Grid<double>& target) {
  require_same_shape(pred, target, "bce_tbm_loss");
  LossValue out{0.0, Grid<double>(pred.rows(), pred.cols())};
  const auto& p = pred.values();
  const auto& y = target.values();
  auto& g = out.grad.values();
  constexpr double lo = kBceClamp;
  constexpr double hi = 1.0 - kBceClamp;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], lo, hi);
    out.loss -= y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
    // Clamped bins are flat in pred.
    g[i] = (p[i] > lo && p[i] < hi) ? -y[i] / q + (1.0 - y[i]) / (1.0 - q) : 0.0;
  }
  return out;
}

LossReport combined_loss(const Grid<double>& pred_irm,
                         const Grid<double>& pred_tbm,
                         const Grid<double>& target_irm,
                         const Grid<double>& target_tbm, const LossWeights& w) {
  if (w.lambda != 0.0) {
    throw UnsupportedFeature(
        "combined_loss: perceptual loss weight must be 0 (no perceptual "
        "quality network is available)");
  }
  if (!(w.alpha >= 0.0)) {
    throw InvalidArgument("combined_loss: alpha must be nonnegative");
  }
  require_same_shape(pred_irm, pred_tbm, "combined_loss");
  auto irm = mse_irm_loss(pred_irm, target_irm);
  auto tbm = bce_tbm_loss(pred_tbm, target_tbm);

  LossReport r;
  r.irm_loss = irm.loss;
  r.tbm_loss = tbm.loss;
  r.total = irm.loss + w.alpha * tbm.loss;
  r.grad_irm = std::move(irm.grad);
  r.grad_tbm = std::move(tbm.grad);
  for (auto& v : r.grad_tbm.values()) v *= w.alpha;
  return r;
}

}  // namespace maskfuse
