#ifndef GPTWALK_QP_HPP
#define GPTWALK_QP_HPP

#include "gptwalk/types.hpp"

namespace gptwalk {

// Box-constrained strictly convex quadratic program
//   min 0.5 x^T H x + g^T x   s.t.  lo <= x <= hi.
struct QPProblem {
  MatX H;  // symmetric positive definite
  VecX g;
  VecX lo;
  VecX hi;
};

// Dense primal active-set solve. Throws Error when the iteration limit
// (100 per dimension) is exceeded.
VecX qp_solve(const QPProblem& prob);

// Projected-gradient optimality residual max_i |x_i - clip(x_i - grad_i)|
// joined with bound violations; zero exactly at the optimum.
Scalar kkt_residual(const QPProblem& prob, const VecX& x);

// Separable torque-relaxation instance: min u^T u + p (u-N)^T (u-N) over
// the box, solved coordinatewise as clip(p N_j / (1+p)).
VecX box_qp_closed_form(const VecX& N, const VecX& lo, const VecX& hi,
                        Scalar p);

}  // namespace gptwalk

#endif
