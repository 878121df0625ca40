#ifndef GPTWALK_INTEGRATOR_HPP
#define GPTWALK_INTEGRATOR_HPP

#include <functional>

#include "gptwalk/types.hpp"

namespace gptwalk {

using OdeRhs = std::function<VecX(Scalar, const VecX&)>;

// Dense-output interpolant of one accepted step (quartic in theta).
struct DenseOutput {
  Scalar t0 = 0, h = 0;
  MatX rcont;  // d x 5
  VecX eval(Scalar t) const;
};

// Dormand-Prince 5(4) embedded pair with FSAL and dense output.
class Dopri5 {
 public:
  Dopri5(OdeRhs rhs, Scalar rtol, Scalar atol, Scalar hmax);

  void set_state(Scalar t, const VecX& y);
  Scalar t() const { return t_; }
  const VecX& y() const { return y_; }

  // Advances one accepted step, not beyond t_end; returns the dense
  // interpolant covering [previous t, new t]. Throws SimulationError on
  // step-size underflow.
  DenseOutput step(Scalar t_end);

 private:
  OdeRhs rhs_;
  Scalar rtol_, atol_, hmax_;
  Scalar t_ = 0;
  VecX y_;
  VecX k1_;
  bool have_k1_ = false;
  Scalar h_ = 0;
  bool last_rejected_ = false;
};

// Bisection for g over [ta, tb] with g(ta) > 0 and g(tb) <= 0; returns the
// first time with |g| <= tol_g (downward crossing convention).
Scalar bisect_zero(const std::function<Scalar(Scalar)>& g, Scalar ta,
                   Scalar tb, Scalar tol_g, int max_iter = 200);

}  // namespace gptwalk

#endif
