// include/maskfuse/objectives.hpp

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

#ifndef MASKFUSE_OBJECTIVES_HPP_
#define MASKFUSE_OBJECTIVES_HPP_

#include "maskfuse/common.hpp"

namespace maskfuse {

/// Weights of the multi-target objective. `lambda` scales the perceptual
/// term, which this library does not provide; it must stay 0.
struct LossWeights {
  double alpha = 0.1;
  double lambda = 0.0;
};

struct LossValue {
  double loss = 0.0;
  Grid<double> grad;
};

struct LossReport {
  double irm_loss = 0.0;
  double tbm_loss = 0.0;
  double total = 0.0;
  Grid<double> grad_irm;
  Grid<double> grad_tbm;
};

inline constexpr double kBceClamp = 1e-7;

/// Summed squared error and its gradient 2 (pred - target).
LossValue mse_irm_loss(const Grid<double>& pred, const Grid<double>& target);

/// Summed binary cross entropy with predictions clamped to
/// [kBceClamp, 1 - kBceClamp]. Clamped bins get a zero gradient.
LossValue bce_tbm_loss(const Grid<double>& pred, const Grid<double>& target);

/// irm + alpha * tbm. Throws UnsupportedFeature when lambda != 0.
LossReport combined_loss(const Grid<double>& pred_irm,
                         const Grid<double>& pred_tbm,
                         const Grid<double>& target_irm,
                         const Grid<double>& target_tbm, const LossWeights& w);

}  // namespace maskfuse

#endif  // MASKFUSE_OBJECTIVES_HPP_
