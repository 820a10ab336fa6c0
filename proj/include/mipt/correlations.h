// Copyright 2026 The mipt-quan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIPT_CORRELATIONS_H
#define MIPT_CORRELATIONS_H

#include <vector>

#include "mipt/circuits.h"
#include "mipt/stats.h"

namespace mipt {

/// Raw equal-site correlator C(dt) = < m(t0, x0) m(t0 + dt, x0) >, averaged
/// over trajectories, sites and start times t0 in [0, 2L - dt). The error is
/// the standard error across the (t0, x0) points.
MeanError spatiotemporal_corr(const std::vector<TrajectoryRecord> &records, size_t dt);

}  // namespace mipt

#endif
