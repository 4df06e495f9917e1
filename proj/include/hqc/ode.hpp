#pragma once

// Adaptive Dormand-Prince 8(5,3) integration for Eigen-valued states,
// with steps clipped so that every requested output time is hit exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "hqc/dop853_tableau.hpp"
#include "hqc/errors.hpp"

namespace hqc {

struct OdeOptions {
  double rtol = 1e-9;  ///< per-step relative tolerance
  double atol = 1e-12;
  double initial_step = 0.0;  ///< 0 picks a step from the first two derivatives
  std::size_t max_steps = 5'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

/// Root-mean-square of |x_i| / scale_i.
inline double scaled_rms(const Eigen::MatrixXcd& x, const Eigen::MatrixXd& scale) {
  return std::sqrt((x.cwiseAbs().array() / scale.array()).square().mean());
}

}  // namespace detail

/// Integrates y' = f(t, y) through every time in grid (strictly increasing).
/// observe(k, t, y) runs at each grid point including the first;
/// after_step(t, y) may adjust y after each accepted step.
template <class Rhs, class Observe, class AfterStep>
OdeStats integrate_on_grid(Rhs&& f, Eigen::MatrixXcd y, std::span<const double> grid, const OdeOptions& opt,
                           Observe&& observe, AfterStep&& after_step) {
  using State = Eigen::MatrixXcd;
  namespace rk = dop853;
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0, kExponent = -1.0 / 8.0;

  OdeStats stats;
  if (grid.empty()) return stats;
  double t = grid.front();
  observe(std::size_t{0}, t, y);
  if (grid.size() == 1) return stats;

  const double span = grid.back() - grid.front();
  std::array<State, rk::stages + 1> k;
  k[0] = f(t, y);

  double h = opt.initial_step;
  if (h <= 0.0) {
    const Eigen::MatrixXd scale = (opt.atol + opt.rtol * y.cwiseAbs().array()).matrix();
    const double d0 = detail::scaled_rms(y, scale);
    const double d1 = detail::scaled_rms(k[0], scale);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const State f1 = f(t + h0, State(y + h0 * k[0]));
    const double d2 = detail::scaled_rms(State(f1 - k[0]), scale) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                   : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    h = std::min({100.0 * h0, h1, span});
  }
  const double h_floor = 1e-14 * std::max(1.0, std::abs(grid.back()));

  State y_new(y.rows(), y.cols()), stage(y.rows(), y.cols());
  State err5(y.rows(), y.cols()), err3(y.rows(), y.cols());
  Eigen::MatrixXd scale(y.rows(), y.cols());
  const double n = double(y.size());
  std::size_t next = 1;
  while (next < grid.size()) {
    const double target = grid[next];
    bool hit = false;
    double step = h;
    if (t + step >= target - 1e-15 * std::max(1.0, std::abs(target))) {
      step = target - t;
      hit = true;
    }
    if (stats.accepted + stats.rejected >= opt.max_steps)
      throw integration_error(t, "maximum number of integrator steps exceeded");

    for (int s = 1; s < rk::stages; ++s) {
      stage = y;
      for (int j = 0; j < s; ++j)
        if (rk::A[s][j] != 0.0) stage.noalias() += (step * rk::A[s][j]) * k[j];
      k[s] = f(t + rk::C[s] * step, stage);
    }
    y_new = y;
    for (int s = 0; s < rk::stages; ++s)
      if (rk::B[s] != 0.0) y_new.noalias() += (step * rk::B[s]) * k[s];
    const double t_new = hit ? target : t + step;
    k[rk::stages] = f(t_new, y_new);

    err5.setZero();
    err3.setZero();
    for (int s = 0; s <= rk::stages; ++s) {
      if (rk::E5[s] != 0.0) err5.noalias() += rk::E5[s] * k[s];
      if (rk::E3[s] != 0.0) err3.noalias() += rk::E3[s] * k[s];
    }
    scale = (opt.atol + opt.rtol * y.cwiseAbs().array().max(y_new.cwiseAbs().array())).matrix();
    const double e5 = (err5.cwiseAbs().array() / scale.array()).square().sum();
    const double e3 = (err3.cwiseAbs().array() / scale.array()).square().sum();
    const double denom = e5 + 0.01 * e3;
    const double en = denom > 0.0 ? std::abs(step) * e5 / std::sqrt(denom * n) : 0.0;
    if (!std::isfinite(en)) throw integration_error(t, "non-finite state during integration");

    if (en < 1.0) {
      ++stats.accepted;
      t = t_new;
      y.swap(y_new);
      after_step(t, y);
      k[0] = k[rk::stages];
      if (hit) {
        observe(next, t, y);
        ++next;
      }
      const double fac = en == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(en, kExponent));
      // A step shortened to land on a grid point does not shrink the next one.
      h = hit ? std::max(h, step * fac) : step * fac;
    } else {
      ++stats.rejected;
      h = step * std::max(kMinFactor, kSafety * std::pow(en, kExponent));
      if (h < h_floor) throw step_underflow_error(t, h);
    }
  }
  return stats;
}

}  // namespace hqc
