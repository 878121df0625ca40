#ifndef GPTWALK_BEZIER_HPP
#define GPTWALK_BEZIER_HPP

#include "gptwalk/types.hpp"

namespace gptwalk {

// Bernstein-basis polynomial curve; row k of coef holds coefficient alpha_k
// for every output channel (columns).
struct BezierCurve {
  MatX coef;  // (order+1) x dim
  int order() const { return static_cast<int>(coef.rows()) - 1; }
  int dim() const { return static_cast<int>(coef.cols()); }
};

struct BezierEval {
  VecX value;
  VecX d1;  // d/ds
  VecX d2;  // d^2/ds^2
};

// Evaluates at s clamped into [0,1]; derivatives are the polynomial's
// derivatives at the clamped point.
BezierEval bezier_eval(const BezierCurve& curve, Scalar s);

// Least-squares Bernstein fit of samples (one column of values per sample
// point) with the first/last n_clamp coefficients pinned to given values.
BezierCurve bezier_fit(const VecX& s_samples, const MatX& values, int order,
                       const MatX& head_coefs, const MatX& tail_coefs);

}  // namespace gptwalk

#endif
