#include "gptwalk/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace gptwalk {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC2 = 1.0 / 5.0;
constexpr double kC3 = 3.0 / 10.0;
constexpr double kC4 = 4.0 / 5.0;
constexpr double kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0,
                 kA74 = 125.0 / 192.0, kA75 = -2187.0 / 6784.0,
                 kA76 = 11.0 / 84.0;

constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;

}  // namespace

VecX DenseOutput::eval(Scalar t) const {
  const Scalar th = (t - t0) / h;
  const Scalar th1 = 1.0 - th;
  return rcont.col(0) +
         th * (rcont.col(1) +
               th1 * (rcont.col(2) + th * (rcont.col(3) + th1 * rcont.col(4))));
}

Dopri5::Dopri5(OdeRhs rhs, Scalar rtol, Scalar atol, Scalar hmax)
    : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol), hmax_(hmax) {}

void Dopri5::set_state(Scalar t, const VecX& y) {
  t_ = t;
  y_ = y;
  have_k1_ = false;
  h_ = 0;
  last_rejected_ = false;
}

DenseOutput Dopri5::step(Scalar t_end) {
  if (y_.size() == 0) throw SimulationError("integrator state not set");
  if (!(t_end > t_)) throw SimulationError("integrator: t_end <= t");
  const auto d = y_.size();

  if (!have_k1_) {
    k1_ = rhs_(t_, y_);
    have_k1_ = true;
  }
  if (h_ <= 0) {
    // Crude but deterministic initial guess from the first slope.
    Scalar d0 = 0, d1 = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const Scalar sc = atol_ + rtol_ * std::abs(y_[i]);
      d0 += (y_[i] / sc) * (y_[i] / sc);
      d1 += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / d);
    d1 = std::sqrt(d1 / d);
    h_ = (d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6;
    h_ = std::clamp(h_, Scalar(1e-8), hmax_);
  }

  VecX k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), ynew(d), err(d);
  for (int attempt = 0; attempt < 400; ++attempt) {
    Scalar h = std::min(h_, std::min(hmax_, t_end - t_));
    const bool clipped = h < h_;
    if (h < 1e-14 * std::max(Scalar(1), std::abs(t_)))
      throw SimulationError("integrator: step size underflow");

    k2 = rhs_(t_ + kC2 * h, y_ + h * (kA21 * k1_));
    k3 = rhs_(t_ + kC3 * h, y_ + h * (kA31 * k1_ + kA32 * k2));
    k4 = rhs_(t_ + kC4 * h, y_ + h * (kA41 * k1_ + kA42 * k2 + kA43 * k3));
    k5 = rhs_(t_ + kC5 * h,
              y_ + h * (kA51 * k1_ + kA52 * k2 + kA53 * k3 + kA54 * k4));
    k6 = rhs_(t_ + h, y_ + h * (kA61 * k1_ + kA62 * k2 + kA63 * k3 +
                                kA64 * k4 + kA65 * k5));
    ynew = y_ + h * (kA71 * k1_ + kA73 * k3 + kA74 * k4 + kA75 * k5 +
                     kA76 * k6);
    k7 = rhs_(t_ + h, ynew);
    err = h * (kE1 * k1_ + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
               kE7 * k7);

    Scalar errnorm = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const Scalar sc =
          atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
      errnorm += (err[i] / sc) * (err[i] / sc);
    }
    errnorm = std::sqrt(errnorm / d);

    const Scalar facmax = last_rejected_ ? 1.0 : kFacMax;
    Scalar fac = kSafety * std::pow(std::max(errnorm, Scalar(1e-16)), -0.2);
    fac = std::clamp(fac, Scalar(kFacMin), facmax);

    if (errnorm <= 1.0) {
      DenseOutput out;
      out.t0 = t_;
      out.h = h;
      out.rcont.resize(d, 5);
      const VecX ydiff = ynew - y_;
      const VecX bspl = h * k1_ - ydiff;
      out.rcont.col(0) = y_;
      out.rcont.col(1) = ydiff;
      out.rcont.col(2) = bspl;
      out.rcont.col(3) = ydiff - h * k7 - bspl;
      out.rcont.col(4) = h * (kD1 * k1_ + kD3 * k3 + kD4 * k4 + kD5 * k5 +
                              kD6 * k6 + kD7 * k7);
      t_ += h;
      y_ = ynew;
      k1_ = k7;
      last_rejected_ = false;
      if (!clipped) h_ = h * fac;
      return out;
    }
    last_rejected_ = true;
    h_ = h * fac;
  }
  throw SimulationError("integrator: too many rejected steps");
}

Scalar bisect_zero(const std::function<Scalar(Scalar)>& g, Scalar ta,
                   Scalar tb, Scalar tol_g, int max_iter) {
  Scalar ga = g(ta);
  Scalar gb = g(tb);
  if (ga <= 0) return ta;  // already at or past the crossing
  if (gb > 0) throw SimulationError("bisect_zero: no sign change in bracket");
  Scalar tm = tb, gm = gb;
  for (int it = 0; it < max_iter; ++it) {
    tm = 0.5 * (ta + tb);
    gm = g(tm);
    if (std::abs(gm) <= tol_g) return tm;
    if (gm > 0) {
      ta = tm;
      ga = gm;
    } else {
      tb = tm;
      gb = gm;
    }
    if (tb - ta < 1e-16 * std::max(Scalar(1), std::abs(tb))) break;
  }
  // Tightest bracket reached; report the non-positive side so the guard is
  // never still positive at the returned time.
  return std::abs(ga) < std::abs(gb) && ga <= 0 ? ta : tb;
}

}  // namespace gptwalk
