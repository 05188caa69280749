#include "tube/linsolve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

#include "tube/errors.hpp"

namespace tube {

namespace {

double inf_norm(const SpMatR& A) {
  Eigen::VectorXd rowSum = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMatR::InnerIterator it(A, k); it; ++it)
      rowSum[it.row()] += std::abs(it.value());
  return rowSum.size() ? rowSum.maxCoeff() : 0.0;
}

bool is_symmetric(const SpMatR& A, double normA) {
  SpMatR D = SpMatR(A.transpose()) - A;
  double defect = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMatR::InnerIterator it(D, k); it; ++it)
      defect = std::max(defect, std::abs(it.value()));
  return defect <= 1e-12 * std::max(normA, 1.0);
}

// Deflated Jacobi-preconditioned CG on -A (positive semidefinite with kernel
// along `kern`). b must already be orthogonal to kern.
SolveReport cg_deflated(const SpMatR& A, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& kern, Eigen::VectorXd& x,
                        const SolveOptions& opts) {
  const auto n = A.rows();
  SolveReport rep;
  rep.method = "deflated-jacobi-cg";

  Eigen::VectorXd k = kern / kern.norm();
  auto deflate = [&](Eigen::VectorXd& v) { v -= k * k.dot(v); };

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMatR::InnerIterator it(A, c); it; ++it)
      if (it.row() == it.col()) diag[it.row()] = -it.value();
  if (diag.minCoeff() <= 0.0)
    throw SolverDiverged("cg preconditioner needs a positive diagonal");
  Eigen::VectorXd invDiag = diag.cwiseInverse();

  const double bnorm = b.norm();
  x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const double target = opts.tol * bnorm;
  const int maxIter = opts.maxIter > 0
                          ? opts.maxIter
                          : 2000 + 60 * int(std::sqrt(double(n)));

  Eigen::VectorXd bp = -b;  // solve (-A) x = -b
  Eigen::VectorXd r = bp;
  deflate(r);
  Eigen::VectorXd z = invDiag.cwiseProduct(r);
  deflate(z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < maxIter; ++it) {
    Eigen::VectorXd Ap = -(A * p);
    deflate(Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw SolverDiverged("cg lost positive definiteness");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    rep.iterations = it + 1;
    if (r.norm() <= target) break;
    z = invDiag.cwiseProduct(r);
    deflate(z);
    const double rzNew = r.dot(z);
    p = z + (rzNew / rz) * p;
    rz = rzNew;
  }
  deflate(x);
  rep.residual = (A * x - b).norm();
  rep.converged = rep.residual <= 10.0 * target;
  return rep;
}

// Bordered direct solve: [[A, beta 1],[beta 1^T, 0]] [x; mu] = [b; 0].
// Nonsingular because the left and right kernels both have nonzero overlap
// with the constant vector (the stationary density is positive).
SolveReport bordered_lu(const SpMatR& A, const Eigen::VectorXd& b,
                        Eigen::VectorXd& x, double normA) {
  const auto n = A.rows();
  SolveReport rep;
  rep.method = "bordered-sparselu";

  const double beta = std::max(normA, 1.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(A.nonZeros()) + 2 * size_t(n));
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMatR::InnerIterator it(A, c); it; ++it)
      trip.emplace_back(int(it.row()), int(it.col()), it.value());
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, int(n), beta);
    trip.emplace_back(int(n), i, beta);
  }
  SpMatR B(n + 1, n + 1);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();

  Eigen::SparseLU<SpMatR> lu(B);
  if (lu.info() != Eigen::Success)
    throw SolverDiverged("bordered factorization failed");

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = b;
  Eigen::VectorXd z = lu.solve(rhs);
  // one step of iterative refinement on the bordered system
  Eigen::VectorXd resid = rhs - B * z;
  z += lu.solve(resid);
  rep.iterations = 2;

  x = z.head(n);
  x.array() -= x.mean();
  rep.residual = (A * x - b).norm();
  rep.converged = true;
  return rep;
}

}  // namespace

SolveReport solve_singular_compatible(const SpMatR& A, const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& leftKernel,
                                      Eigen::VectorXd& x,
                                      const SolveOptions& opts) {
  if (A.rows() != A.cols() || A.rows() != b.size() ||
      b.size() != leftKernel.size())
    throw BadSpec("solver dimensions disagree");
  const auto n = A.rows();
  const double normA = inf_norm(A);
  const double knorm = leftKernel.norm();
  const double bnorm = b.norm();
  if (knorm == 0.0) throw BadSpec("left kernel vector is zero");

  // b assembled from O(normA) terms that cancel analytically is pure
  // roundoff; treat it as zero rather than testing compatibility on noise.
  const double negligible =
      1e-13 * normA * std::sqrt(double(n > 0 ? n : 1));
  if (bnorm <= negligible) {
    x = Eigen::VectorXd::Zero(n);
    SolveReport rep;
    rep.converged = true;
    rep.method = "trivial";
    return rep;
  }

  const double overlap = std::abs(leftKernel.dot(b)) / (knorm * bnorm);
  if (overlap > opts.compatTol)
    throw IncompatibleRHS("rhs has relative component " + std::to_string(overlap) +
                          " along the left kernel");
  Eigen::VectorXd bp = b - leftKernel * (leftKernel.dot(b) / (knorm * knorm));

  SolveReport rep;
  if (is_symmetric(A, normA))
    rep = cg_deflated(A, bp, leftKernel, x, opts);
  else
    rep = bordered_lu(A, bp, x, normA);

  const double target =
      opts.tol * std::max({bp.norm(), normA * x.norm(), normA});
  if (!(rep.residual <= std::max(target, 1e-300)) || !rep.converged)
    throw NotConverged("singular solve residual " + std::to_string(rep.residual) +
                       " misses target " + std::to_string(target) + " (" +
                       rep.method + ")");
  rep.converged = true;
  return rep;
}

Nullvector nullvector(const SparseOperator& fp, const Grid& g,
                      const SolveOptions& opts) {
  if (!fp.real) throw BadSpec("stationary density needs the untwisted operator");
  const auto n = fp.MR.rows();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd rhs = -(fp.MR * ones);

  Nullvector out;
  if (rhs.norm() == 0.0) {
    // uniform density is already stationary (straight tube, any drift)
    out.pi = ones;
    out.report.converged = true;
    out.report.method = "uniform";
  } else {
    Eigen::VectorXd w;
    out.report = solve_singular_compatible(fp.MR, rhs, ones, w, opts);
    out.pi = ones + w;
  }

  if (out.pi.minCoeff() <= 0.0)
    throw NonPositiveNullvector("stationary density has entries <= 0 (min " +
                                std::to_string(out.pi.minCoeff()) + ")");
  out.pi /= out.pi.sum() * g.cellMeasure();
  return out;
}

EigenPair eigen_shift_invert(const SpMatC& M, cplx shift,
                             const Eigen::VectorXcd& v0, double scale,
                             const SolveOptions& opts) {
  const auto n = M.rows();
  SpMatC S = M;
  for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= shift;
  S.makeCompressed();
  Eigen::SparseLU<SpMatC> lu(S);
  if (lu.info() != Eigen::Success)
    throw ShiftSingular("cannot factor operator minus shift");

  Eigen::VectorXcd v = v0.size() == n ? v0 : Eigen::VectorXcd::Ones(n);
  if (!(v.norm() > 0.0)) v = Eigen::VectorXcd::Ones(n);
  v /= v.norm();

  EigenPair out;
  const int maxIter = opts.maxIter > 0 ? opts.maxIter : 200;
  const double target = opts.tol * std::max(scale, 1.0);
  // Keep iterating a little past the tolerance: the eigenvalue itself gains
  // accuracy down to the residual floor, which symmetry checks rely on.
  double bestRes = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd bestVec;
  cplx bestLambda = 0.0;
  int polish = -1;
  for (int it = 0; it < maxIter; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    const double wn = w.norm();
    if (!std::isfinite(wn) || wn == 0.0)
      throw ShiftSingular("shift-invert step produced a non-finite iterate");
    v = w / wn;
    Eigen::VectorXcd Mv = M * v;
    const cplx lambda = v.dot(Mv);  // Eigen's dot conjugates the left argument
    const double res = (Mv - lambda * v).norm();
    out.iterations = it + 1;
    if (res < bestRes) {
      bestRes = res;
      bestLambda = lambda;
      bestVec = v;
    }
    if (polish < 0 && res <= target) polish = 3;
    if (polish == 0 || bestRes <= 1e-14 * std::max(scale, 1.0)) break;
    if (polish > 0) --polish;
  }
  out.lambda = bestLambda;
  out.residual = bestRes;
  v = bestVec;
  if (out.residual > target)
    throw NotConverged("shift-invert residual " + std::to_string(out.residual) +
                       " misses target " + std::to_string(target));

  int imax = 0;
  double amax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(v[i]);
    if (a > amax) {
      amax = a;
      imax = i;
    }
  }
  if (amax > 0.0) v *= std::conj(v[imax]) / amax;
  out.vec = v;
  return out;
}

}  // namespace tube
