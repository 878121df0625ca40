#include "gptwalk/lyapunov.hpp"

#include <Eigen/Eigenvalues>

namespace gptwalk {

bool hurwitz_check(const MatX& A, Scalar tol) {
  if (A.rows() != A.cols() || A.rows() == 0) return false;
  const Eigen::EigenSolver<MatX> es(A, false);
  return es.eigenvalues().real().maxCoeff() < -tol;
}

MatX lyapunov_solve(const MatX& A, const MatX& Q) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || Q.rows() != d || Q.cols() != d)
    throw Error("lyapunov_solve: dimension mismatch");
  if (!hurwitz_check(A)) throw Error("lyapunov_solve: A is not Hurwitz");

  // vec(A^T P + P A) = -vec(Q), column-major vec index j*d+i.
  MatX K = MatX::Zero(d * d, d * d);
  VecX rhs(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int row = j * d + i;
      for (int k = 0; k < d; ++k) K(row, j * d + k) += A(k, i);
      for (int l = 0; l < d; ++l) K(row, l * d + i) += A(l, j);
      rhs(row) = -Q(i, j);
    }
  const VecX vp = Eigen::PartialPivLU<MatX>(K).solve(rhs);
  MatX P(d, d);
  for (int j = 0; j < d; ++j) P.col(j) = vp.segment(j * d, d);
  return 0.5 * (P + P.transpose());
}

DomainCert build_domain_cert(const VecX& kp, const VecX& kd, const MatX& Q) {
  const int m = static_cast<int>(kp.size());
  if (kd.size() != m || m == 0)
    throw Error("build_domain_cert: gain dimension mismatch");
  DomainCert cert;
  cert.A = MatX::Zero(2 * m, 2 * m);
  cert.A.topRightCorner(m, m).setIdentity();
  cert.A.bottomLeftCorner(m, m) = -MatX(kp.asDiagonal());
  cert.A.bottomRightCorner(m, m) = -MatX(kd.asDiagonal());
  cert.Q = Q.size() > 0 ? Q : MatX(MatX::Identity(2 * m, 2 * m));
  if (cert.Q.rows() != 2 * m || cert.Q.cols() != 2 * m)
    throw Error("build_domain_cert: Q dimension mismatch");
  if (!hurwitz_check(cert.A))
    throw Error("build_domain_cert: closed-loop matrix is not Hurwitz");
  cert.P = lyapunov_solve(cert.A, cert.Q);
  const Eigen::SelfAdjointEigenSolver<MatX> esp(cert.P);
  const Eigen::SelfAdjointEigenSolver<MatX> esq(cert.Q);
  cert.c1 = esp.eigenvalues().minCoeff();
  cert.c2 = esp.eigenvalues().maxCoeff();
  cert.c3 = esq.eigenvalues().minCoeff() / cert.c2;
  if (!(cert.c1 > 0))
    throw Error("build_domain_cert: P is not positive definite");
  return cert;
}

Scalar eval_V(const DomainCert& cert, const VecX& x) {
  if (x.size() != cert.P.rows())
    throw Error("eval_V: state dimension mismatch");
  return x.dot(cert.P * x);
}

Scalar eval_V_U(const LyapunovCertificate& cert, const VecX& x_xi,
                const VecX& x_eta) {
  return eval_V(cert.Xi, x_xi) + cert.beta * x_eta.squaredNorm();
}

}  // namespace gptwalk
