#include "tube/operators.hpp"

#include <cmath>

namespace tube {

double bernoulli(double x) {
  if (std::abs(x) < 1e-5) {
    // x/(e^x-1) = 1 - x/2 + x^2/12 - x^4/720 + ...
    return 1.0 - 0.5 * x + x * x / 12.0;
  }
  return x / std::expm1(x);
}

double SparseOperator::scale() const {
  double s = 2.0 * dim / (h * h);
  return s * std::max(1.0, bernoulli(-std::abs(V) * h));
}

namespace {

inline double conj_if_complex(double x) { return x; }
inline cplx conj_if_complex(cplx x) { return std::conj(x); }

template <typename Scalar>
void fill_triplets(const Grid& g, double V, Scalar phase,
                   std::vector<Eigen::Triplet<Scalar>>& trip) {
  const double ih2 = 1.0 / (g.h * g.h);
  const double q = V * g.h;
  const double bm = bernoulli(-q);  // weight on the lower-s cell in the flux
  const double bp = bernoulli(q);   // weight on the upper-s cell
  for (const auto& f : g.faces) {
    if (f.kind == FaceKind::Wall) continue;
    double wa = f.axis == 0 ? bm : 1.0;  // flux coefficient of cell a
    double wb = f.axis == 0 ? bp : 1.0;  // flux coefficient of cell b
    Scalar offAB = Scalar(wb * ih2);     // row a, column b
    Scalar offBA = Scalar(wa * ih2);     // row b, column a
    if (f.kind == FaceKind::Seam) {
      // a sits at s = 1-h/2, b at s = h/2: couplings toward the s=0 side
      // gain e^{+i theta}, toward the s=1 side e^{-i theta}.
      offAB *= phase;
      offBA *= conj_if_complex(phase);
    }
    trip.emplace_back(f.a, f.a, Scalar(-wa * ih2));
    trip.emplace_back(f.a, f.b, offAB);
    trip.emplace_back(f.b, f.a, offBA);
    trip.emplace_back(f.b, f.b, Scalar(-wb * ih2));
  }
}

}  // namespace

SparseOperator assemble_fokker_planck(const Grid& g, double V, double theta) {
  SparseOperator op;
  op.n = g.nCells();
  op.dim = g.dim;
  op.h = g.h;
  op.V = V;
  op.theta = theta;

  double si = std::sin(theta);
  op.real = std::abs(si) < 1e-14;
  if (op.real) {
    double phase = std::cos(theta) >= 0 ? 1.0 : -1.0;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.faces.size() * 4);
    fill_triplets<double>(g, V, phase, trip);
    op.MR.resize(op.n, op.n);
    op.MR.setFromTriplets(trip.begin(), trip.end());
    op.MR.makeCompressed();
  } else {
    cplx phase(std::cos(theta), si);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(g.faces.size() * 4);
    fill_triplets<cplx>(g, V, phase, trip);
    op.MC.resize(op.n, op.n);
    op.MC.setFromTriplets(trip.begin(), trip.end());
    op.MC.makeCompressed();
  }
  return op;
}

SparseOperator generator_from_adjoint(const SparseOperator& fp) {
  SparseOperator op = fp;
  if (fp.real) {
    op.MR = SpMatR(fp.MR.transpose());
    op.MR.makeCompressed();
  } else {
    op.MC = SpMatC(fp.MC.adjoint());
    op.MC.makeCompressed();
  }
  return op;
}

std::vector<double> generator_applied_to_s(const Grid& g, double V) {
  const double q = V * g.h;
  const double bm = bernoulli(-q);
  const double bp = bernoulli(q);
  const double ih = 1.0 / g.h;
  std::vector<double> out(g.nCells(), 0.0);
  // Generator flux form: (M u)_a += B(-q)/h^2 (u_b - u_a) per +s face, and
  // (M u)_b += B(q)/h^2 (u_a - u_b). With u = unwrapped s the differences
  // are +-h on every non-wall s-face, seam included.
  for (const auto& f : g.faces) {
    if (f.axis != 0 || f.kind == FaceKind::Wall) continue;
    out[f.a] += bm * ih;
    out[f.b] -= bp * ih;
  }
  return out;
}

}  // namespace tube
