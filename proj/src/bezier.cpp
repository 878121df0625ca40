#include "gptwalk/bezier.hpp"

#include <algorithm>

namespace gptwalk {

namespace {

// Bernstein basis values b_{k,m}(s), k = 0..m.
VecX bernstein(int m, Scalar s) {
  VecX b = VecX::Zero(m + 1);
  b(0) = 1.0;
  for (int j = 1; j <= m; ++j) {
    Scalar prev = 0.0;
    for (int k = 0; k <= j; ++k) {
      const Scalar cur = b(k);
      b(k) = cur * (1 - s) + prev * s;
      prev = cur;
    }
  }
  return b;
}

}  // namespace

BezierEval bezier_eval(const BezierCurve& curve, Scalar s) {
  const int m = curve.order();
  if (m < 1) throw Error("bezier_eval: order must be >= 1");
  if (!curve.coef.allFinite()) throw Error("bezier_eval: non-finite curve");
  s = std::clamp(s, 0.0, 1.0);

  BezierEval out;
  out.value = curve.coef.transpose() * bernstein(m, s);

  MatX d1c = m * (curve.coef.bottomRows(m) - curve.coef.topRows(m));
  out.d1 = d1c.transpose() * bernstein(m - 1, s);

  if (m >= 2) {
    MatX d2c = (m - 1) * (d1c.bottomRows(m - 1) - d1c.topRows(m - 1));
    out.d2 = d2c.transpose() * bernstein(m - 2, s);
  } else {
    out.d2 = VecX::Zero(curve.dim());
  }
  return out;
}

BezierCurve bezier_fit(const VecX& s_samples, const MatX& values, int order,
                       const MatX& head_coefs, const MatX& tail_coefs) {
  const int m = order;
  const int dim = static_cast<int>(values.rows());
  const int ns = static_cast<int>(s_samples.size());
  const int nh = static_cast<int>(head_coefs.rows());
  const int nt = static_cast<int>(tail_coefs.rows());
  const int nfree = m + 1 - nh - nt;
  if (values.cols() != ns) throw Error("bezier_fit: sample count mismatch");
  if (nfree < 0) throw Error("bezier_fit: too many pinned coefficients");

  MatX basis(ns, m + 1);
  for (int i = 0; i < ns; ++i)
    basis.row(i) = bernstein(m, std::clamp(s_samples(i), 0.0, 1.0)).transpose();

  BezierCurve c;
  c.coef.resize(m + 1, dim);
  if (nh > 0) c.coef.topRows(nh) = head_coefs;
  if (nt > 0) c.coef.bottomRows(nt) = tail_coefs;
  if (nfree > 0) {
    MatX rhs = values.transpose();  // ns x dim
    if (nh > 0) rhs -= basis.leftCols(nh) * head_coefs;
    if (nt > 0) rhs -= basis.rightCols(nt) * tail_coefs;
    const MatX A = basis.middleCols(nh, nfree);
    c.coef.middleRows(nh, nfree) =
        A.colPivHouseholderQr().solve(rhs);
  }
  return c;
}

}  // namespace gptwalk
