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

#include "cqed/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace cqed {

double interpolate(const std::vector<double>& t, const std::vector<double>& y, double tq) {
  if (t.empty() || t.size() != y.size()) throw InvalidInput("interpolate: bad series");
  if (tq <= t.front()) return y.front();
  if (tq >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
  return (1 - w) * y[i - 1] + w * y[i];
}

Bloch interpolate(const QubitSeries& s, double tq) {
  const auto& t = s.times;
  if (t.empty() || t.size() != s.bloch.size()) throw InvalidInput("interpolate: bad qubit series");
  if (tq <= t.front()) return s.bloch.front();
  if (tq >= t.back()) return s.bloch.back();
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
  const Bloch& a = s.bloch[i - 1];
  const Bloch& b = s.bloch[i];
  return {(1 - w) * a.x + w * b.x, (1 - w) * a.y + w * b.y, (1 - w) * a.z + w * b.z};
}

DistanceSeries trace_distance_series(const QubitSeries& a, const QubitSeries& b) {
  if (a.times.empty() || b.times.empty()) throw InvalidInput("trace distance: empty series");
  const double lo = std::max(a.times.front(), b.times.front());
  const double hi = std::min(a.times.back(), b.times.back());
  if (lo > hi) throw InvalidInput("trace distance: series have disjoint time windows");
  const QubitSeries& coarse = a.times.size() <= b.times.size() ? a : b;
  DistanceSeries d;
  for (double t : coarse.times) {
    if (t < lo - 1e-12 || t > hi + 1e-12) continue;
    const double v = bloch_distance(interpolate(a, t), interpolate(b, t));
    d.times.push_back(t);
    d.distance.push_back(v);
    if (v > d.max) {
      d.max = v;
      d.t_at_max = t;
    }
  }
  return d;
}

namespace {

// Integral of the piecewise-linear interpolant over [a, b].
double integrate_linear(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
  double s = 0;
  const double ya = interpolate(t, y, a);
  auto it = std::upper_bound(t.begin(), t.end(), a);
  double tp = a, yp = ya;
  for (; it != t.end() && *it < b; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    s += 0.5 * (y[i] + yp) * (t[i] - tp);
    tp = t[i];
    yp = y[i];
  }
  s += 0.5 * (interpolate(t, y, b) + yp) * (b - tp);
  return s;
}

}  // namespace

std::vector<double> time_average(const std::vector<double>& t, const std::vector<double>& y, double window) {
  if (t.size() != y.size()) throw InvalidInput("time_average: bad series");
  if (!(window > 0)) return y;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double h = std::min({0.5 * window, t[i] - t.front(), t.back() - t[i]});
    out[i] = h <= 0 ? y[i] : integrate_linear(t, y, t[i] - h, t[i] + h) / (2 * h);
  }
  return out;
}

QubitSeries time_average(const QubitSeries& s, double window) {
  std::vector<double> x, y, z;
  for (const auto& b : s.bloch) {
    x.push_back(b.x);
    y.push_back(b.y);
    z.push_back(b.z);
  }
  x = time_average(s.times, x, window);
  y = time_average(s.times, y, window);
  z = time_average(s.times, z, window);
  QubitSeries out{s.times, {}};
  for (std::size_t i = 0; i < x.size(); ++i) out.bloch.push_back({x[i], y[i], z[i]});
  return out;
}

ExpFit fit_exponential_decay(const std::vector<double>& t_in, const std::vector<double>& y_in, double t_start) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < t_in.size(); ++i) {
    if (t_in[i] >= t_start) {
      t.push_back(t_in[i]);
      y.push_back(y_in[i]);
    }
  }
  const std::size_t n = t.size();
  if (n < 10) throw InvalidInput("exponential fit needs at least 10 samples in the window");
  const double t0 = t.front();
  ExpFit f;
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double c = 0;
  for (std::size_t i = n - tail; i < n; ++i) c += y[i];
  c /= tail;
  // log-linear initial guess on points clearly away from the offset
  const double sign = (y.front() - c) >= 0 ? 1.0 : -1.0;
  const double span = std::abs(y.front() - c);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = sign * (y[i] - c);
    if (v <= 0.05 * span) break;
    const double x = t[i] - t0, ly = std::log(v);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++m;
  }
  double a = y.front() - c, rate = 1.0 / std::max(1e-12, t.back() - t0);
  if (m >= 3) {
    const double den = m * sxx - sx * sx;
    if (den > 0) {
      const double slope = (m * sxy - sx * sy) / den;
      rate = -slope;
      a = sign * std::exp((sy - slope * sx) / m);
    }
  }
  Eigen::Vector3d p(a, rate, c);
  auto residuals = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r) {
    r.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) r(i) = y[i] - (q(0) * std::exp(-q(1) * (t[i] - t0)) + q(2));
    return r.squaredNorm();
  };
  Eigen::VectorXd r;
  double cost = residuals(p, r);
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 3);
  for (f.iterations = 0; f.iterations < 200; ++f.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-p(1) * (t[i] - t0));
      jac(i, 0) = e;
      jac(i, 1) = -p(0) * (t[i] - t0) * e;
      jac(i, 2) = 1;
    }
    const Eigen::Vector3d step = (jac.transpose() * jac).ldlt().solve(jac.transpose() * r);
    double lam = 1;
    Eigen::VectorXd rn;
    double cn = cost;
    Eigen::Vector3d pn = p;
    for (int h = 0; h < 30; ++h) {
      pn = p + lam * step;
      cn = residuals(pn, rn);
      if (cn <= cost) break;
      lam *= 0.5;
    }
    const bool small = (lam * step).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff());
    if (cn <= cost) {
      p = pn;
      r = rn;
      cost = cn;
    }
    if (small || cn > cost) {
      f.converged = true;
      break;
    }
  }
  f.amplitude = p(0);
  f.rate = p(1);
  f.offset = p(2);
  f.residual_rms = std::sqrt(cost / n);
  const double s2 = n > 3 ? cost / (n - 3) : 0;
  f.covariance = s2 * (jac.transpose() * jac).inverse();
  f.decaying = f.converged && f.rate > 0 && std::isfinite(f.rate);
  return f;
}

SweepResult run_sweep(const std::string& axis_name, const std::string& model, const std::vector<double>& axis,
                      int workers, const std::function<std::map<std::string, double>(double)>& fn) {
  SweepResult res{axis_name, model, std::vector<SweepRow>(axis.size())};
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < axis.size(); i = next++) {
      res.rows[i].axis = axis[i];
      try {
        res.rows[i].values = fn(axis[i]);
      } catch (const std::exception& e) {
        res.rows[i].failure = e.what();
      }
    }
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(axis.size())));
  if (w == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(work);
  }
  return res;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw InvalidInput("linspace needs n >= 1");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace cqed
