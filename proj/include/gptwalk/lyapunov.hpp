#ifndef GPTWALK_LYAPUNOV_HPP
#define GPTWALK_LYAPUNOV_HPP

#include "gptwalk/types.hpp"

namespace gptwalk {

// True iff max Re(eig(A)) < -tol.
bool hurwitz_check(const MatX& A, Scalar tol = 1e-9);

// P solving P A + A^T P = -Q, by the vectorized dense linear system
// (intended for d <= 60). Throws on non-Hurwitz A.
MatX lyapunov_solve(const MatX& A, const MatX& Q);

struct DomainCert {
  MatX A, Q, P;
  Scalar c1 = 0;  // lambda_min(P)
  Scalar c2 = 0;  // lambda_max(P)
  Scalar c3 = 0;  // lambda_min(Q) / lambda_max(P)
};

// A = [0 I; -diag(kp) -diag(kd)]; Q defaults to identity.
DomainCert build_domain_cert(const VecX& kp, const VecX& kd,
                             const MatX& Q = MatX());

struct LyapunovCertificate {
  DomainCert F;   // full-actuation outputs
  DomainCert Xi;  // UA transverse block
  DomainCert O;   // over-actuation outputs (three-domain only)
  bool has_O = false;
  Scalar beta = 0.001;
};

Scalar eval_V(const DomainCert& cert, const VecX& x);
// V_U = x_xi^T P_xi x_xi + beta ||x_eta||^2.
Scalar eval_V_U(const LyapunovCertificate& cert, const VecX& x_xi,
                const VecX& x_eta);

}  // namespace gptwalk

#endif
