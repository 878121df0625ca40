#include "gptwalk/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gptwalk {

namespace {

void check_problem(const QPProblem& p) {
  const int d = static_cast<int>(p.g.size());
  if (p.H.rows() != d || p.H.cols() != d || p.lo.size() != d ||
      p.hi.size() != d)
    throw Error("qp_solve: inconsistent dimensions");
  for (int i = 0; i < d; ++i)
    if (!(p.lo(i) <= p.hi(i))) throw Error("qp_solve: empty box");
}

}  // namespace

VecX qp_solve(const QPProblem& prob) {
  check_problem(prob);
  const int d = static_cast<int>(prob.g.size());
  if (d == 0) return VecX();

  // active(i): -1 at lower bound, +1 at upper, 0 free.
  std::vector<int> active(d, 0);
  VecX x(d);
  for (int i = 0; i < d; ++i) {
    x(i) = std::min(std::max(0.0, prob.lo(i)), prob.hi(i));
    if (x(i) <= prob.lo(i))
      active[i] = -1;
    else if (x(i) >= prob.hi(i))
      active[i] = 1;
  }

  const int limit = 100 * d;
  for (int it = 0; it < limit; ++it) {
    const VecX grad = prob.H * x + prob.g;

    // Equality-constrained step on the free variables.
    std::vector<int> free_idx;
    for (int i = 0; i < d; ++i)
      if (active[i] == 0) free_idx.push_back(i);
    VecX dx = VecX::Zero(d);
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      MatX Hf(nf, nf);
      VecX gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf(a) = grad(free_idx[a]);
        for (int b = 0; b < nf; ++b)
          Hf(a, b) = prob.H(free_idx[a], free_idx[b]);
      }
      const VecX df = Eigen::LLT<MatX>(Hf).solve(-gf);
      for (int a = 0; a < nf; ++a) dx(free_idx[a]) = df(a);
    }

    if (dx.lpNorm<Eigen::Infinity>() < 1e-13) {
      // Stationary on the working set; check bound multipliers.
      int worst = -1;
      Scalar worst_mult = -1e-11;
      for (int i = 0; i < d; ++i) {
        if (active[i] == 0) continue;
        // KKT: grad_i = lambda_lo - lambda_hi with lambda >= 0.
        const Scalar mult = active[i] < 0 ? grad(i) : -grad(i);
        if (mult < worst_mult) {
          worst_mult = mult;
          worst = i;
        }
      }
      if (worst < 0) return x;
      active[worst] = 0;
      continue;
    }

    // Step length limited by the nearest blocking bound.
    Scalar alpha = 1.0;
    int blocking = -1;
    int block_side = 0;
    for (int i = 0; i < d; ++i) {
      if (active[i] != 0 || dx(i) == 0) continue;
      if (dx(i) > 0) {
        const Scalar a = (prob.hi(i) - x(i)) / dx(i);
        if (a < alpha) {
          alpha = a;
          blocking = i;
          block_side = 1;
        }
      } else {
        const Scalar a = (prob.lo(i) - x(i)) / dx(i);
        if (a < alpha) {
          alpha = a;
          blocking = i;
          block_side = -1;
        }
      }
    }
    x += alpha * dx;
    if (blocking >= 0) {
      active[blocking] = block_side;
      x(blocking) = block_side > 0 ? prob.hi(blocking) : prob.lo(blocking);
    }
  }
  throw Error("qp_solve: iteration limit exceeded");
}

Scalar kkt_residual(const QPProblem& prob, const VecX& x) {
  check_problem(prob);
  const VecX grad = prob.H * x + prob.g;
  Scalar r = 0;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    r = std::max(r, prob.lo(i) - x(i));
    r = std::max(r, x(i) - prob.hi(i));
    const Scalar proj =
        std::min(std::max(x(i) - grad(i), prob.lo(i)), prob.hi(i));
    r = std::max(r, std::abs(x(i) - proj));
  }
  return r;
}

VecX box_qp_closed_form(const VecX& N, const VecX& lo, const VecX& hi,
                        Scalar p) {
  if (!(p > 0)) throw Error("box_qp_closed_form: p must be positive");
  if (lo.size() != N.size() || hi.size() != N.size())
    throw Error("box_qp_closed_form: dimension mismatch");
  VecX u(N.size());
  for (int i = 0; i < N.size(); ++i)
    u(i) = std::min(std::max(p * N(i) / (1 + p), lo(i)), hi(i));
  return u;
}

}  // namespace gptwalk
