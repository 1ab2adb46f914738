#pragma once

// Explicit Runge–Kutta integrators for small fixed-size systems.
//
// AdaptiveStepper is a Dormand–Prince 5(4) pair with FSAL and a PI-free
// elementary controller; FixedStepRK4 is the classical fourth-order scheme and
// exists mainly as an independent cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "henon/error.hpp"

namespace henon::ode {

template <std::size_t M>
using State = std::array<double, M>;

template <std::size_t M>
struct Tolerance {
  double rtol = 1e-10;
  State<M> atol{};  // per component; 0 means pure relative control
};

template <std::size_t M>
inline State<M> axpy(const State<M>& y, double h, const State<M>& k) {
  State<M> out;
  for (std::size_t i = 0; i < M; ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <std::size_t M, class Rhs>
class AdaptiveStepper {
 public:
  AdaptiveStepper(Rhs rhs, double t0, const State<M>& y0, Tolerance<M> tol, double h0)
      : rhs_(std::move(rhs)), tol_(tol), t_(t0), y_(y0), h_(h0) {
    k1_ = rhs_(t_, y_);
  }

  double t() const { return t_; }
  const State<M>& y() const { return y_; }
  const State<M>& dydt() const { return k1_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }
  void set_max_step(double h) { h_max_ = h; }

  /// Advances by one accepted step without passing t_limit (t_limit > t()).
  void step(double t_limit) {
    for (;;) {
      double h = std::min(h_, h_max_);
      bool clipped = false;
      if (t_ + h >= t_limit) {
        h = t_limit - t_;
        clipped = true;
      }
      if (!(h > 1e-15 * std::max(1.0, std::abs(t_))))
        throw Error(ErrorCode::step_failure, "step size underflow at t=" + std::to_string(t_));

      State<M> y5, err, k7;
      trial(t_, y_, k1_, h, y5, err, k7);
      double en = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        double sc = tol_.atol[i] + tol_.rtol * std::max(std::abs(y_[i]), std::abs(y5[i]));
        if (sc <= 0.0) sc = 1e-300;
        double e = err[i] / sc;
        en += e * e;
      }
      en = std::sqrt(en / M);
      if (!std::isfinite(en)) {
        h_ = 0.25 * h;
        ++rejected_;
        continue;
      }
      double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      if (en <= 1.0) {
        t_ = clipped ? t_limit : t_ + h;
        y_ = y5;
        k1_ = k7;
        ++accepted_;
        // a clipped step says nothing about the natural step size
        if (!clipped || fac < 1.0) h_ = h * fac;
        return;
      }
      ++rejected_;
      h_ = h * std::max(fac, 0.1);
    }
  }

  /// One uncontrolled step of size h from the current state (5th-order
  /// solution). Used for polishing event locations.
  State<M> probe(double h) const {
    State<M> y5, err, k7;
    trial(t_, y_, k1_, h, y5, err, k7);
    return y5;
  }

 private:
  void trial(double t, const State<M>& y, const State<M>& k1, double h, State<M>& y5,
             State<M>& err, State<M>& k7) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    State<M> tmp, k2, k3, k4, k5, k6;
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs_(t + c2 * h, tmp);
    for (std::size_t i = 0; i < M; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs_(t + c3 * h, tmp);
    for (std::size_t i = 0; i < M; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs_(t + c4 * h, tmp);
    for (std::size_t i = 0; i < M; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs_(t + c5 * h, tmp);
    for (std::size_t i = 0; i < M; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs_(t + h, tmp);
    for (std::size_t i = 0; i < M; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs_(t + h, y5);
    for (std::size_t i = 0; i < M; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }

  Rhs rhs_;
  Tolerance<M> tol_;
  double t_;
  State<M> y_;
  State<M> k1_;
  double h_;
  double h_max_ = 1e300;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

/// Classical RK4 step.
template <std::size_t M, class Rhs>
State<M> rk4_step(const Rhs& rhs, double t, const State<M>& y, double h) {
  State<M> k1 = rhs(t, y);
  State<M> k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  State<M> k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  State<M> k4 = rhs(t + h, axpy(y, h, k3));
  State<M> out;
  for (std::size_t i = 0; i < M; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace henon::ode
