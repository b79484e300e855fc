// Copyright 2026 The cqed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/operators.hpp"

namespace cqed {

struct QubitSeries {
  std::vector<double> times;
  std::vector<Bloch> bloch;
};

// Linear interpolation of y(t) at tq; tq must lie inside [t.front(), t.back()].
double interpolate(const std::vector<double>& t, const std::vector<double>& y, double tq);
Bloch interpolate(const QubitSeries& s, double tq);

struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> distance;
  double max = 0;
  double t_at_max = 0;
};

// Both series are resampled onto the coarser grid restricted to the common
// time window. Throws InvalidInput when the windows do not overlap.
DistanceSeries trace_distance_series(const QubitSeries& a, const QubitSeries& b);

// Centered moving average: mean of the linear interpolant over
// [t - w/2, t + w/2], with the window shrunk symmetrically near the ends.
std::vector<double> time_average(const std::vector<double>& t, const std::vector<double>& y, double window);
QubitSeries time_average(const QubitSeries& s, double window);

struct ExpFit {
  double amplitude = 0;
  double rate = 0;
  double offset = 0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double residual_rms = 0;
  int iterations = 0;
  bool converged = false;
  bool decaying = true;
};

// f(t) = A exp(-rate (t - t0)) + offset on samples with t >= t_start, t0 the
// first such sample. Offset starts at the mean of the last 10%, A and rate
// from a log-linear fit, then Gauss-Newton with step halving.
ExpFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y, double t_start = 0);

struct SweepRow {
  double axis = 0;
  std::map<std::string, double> values;
  std::optional<std::string> failure;
};

struct SweepResult {
  std::string axis_name;
  std::string model;
  std::vector<SweepRow> rows;
};

// Evaluates fn at every axis value using up to `workers` threads. Rows come
// back in axis order whatever the scheduling; a failing point is recorded and
// the sweep continues.
SweepResult run_sweep(const std::string& axis_name, const std::string& model, const std::vector<double>& axis,
                      int workers, const std::function<std::map<std::string, double>(double)>& fn);

std::vector<double> linspace(double a, double b, int n);

}  // namespace cqed
