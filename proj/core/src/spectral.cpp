#include "qcal/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcal/errors.hpp"

namespace qcal {

Mat4 SpectralData::projector(int j) const {
  return right.col(j) * left.row(j) / norms[static_cast<std::size_t>(j)];
}

double SpectralData::completeness_residual() const {
  Mat4 sum = Mat4::Zero();
  for (int j = 0; j < 4; ++j) sum += projector(j);
  return (sum - Mat4::Identity()).cwiseAbs().maxCoeff();
}

Mat4 SpectralData::reduced_resolvent() const {
  Mat4 r = Mat4::Zero();
  for (int j = 1; j < 4; ++j) r += projector(j) / eigenvalues[static_cast<std::size_t>(j)];
  return r;
}

namespace {

double overlap(const Eigen::Ref<const Vec4>& a, const Eigen::Ref<const Vec4>& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

// Rescales row j of `left` by 1/c and column j of `right` by c, keeping the
// pairing <v_j|w_j> unchanged.
void rescale(Mat4& left, Mat4& right, int j, cplx c) {
  left.row(j) /= c;
  right.col(j) *= c;
}

}  // namespace

SpectralData spectral_decomposition(const Mat4& m0, double x, const SpectralData* previous,
                                    double rel_tol) {
  Eigen::ComplexEigenSolver<Mat4> solver(m0, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "spectral_decomposition: eigen-solver failed at X = " << x;
    throw NumericalError(os.str());
  }
  const auto& ev = solver.eigenvalues();
  const double g = -0.5 * m0.trace().real();
  const double scale = std::max(g, m0.cwiseAbs().maxCoeff());

  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (std::abs(ev(i) - ev(j)) < rel_tol * scale) {
        std::ostringstream os;
        os << "spectral_decomposition: eigenvalues " << ev(i) << " and " << ev(j)
           << " coincide at X = " << x;
        throw DegeneracyError(os.str(), x);
      }
    }
  }

  std::array<int, 4> order{};
  std::array<bool, 4> used{};
  auto pick = [&](auto distance) {
    int best = -1;
    for (int i = 0; i < 4; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || distance(ev(i)) < distance(ev(best))) best = i;
    }
    used[static_cast<std::size_t>(best)] = true;
    return best;
  };
  order[0] = pick([](cplx l) { return std::abs(l); });
  order[1] = pick([g](cplx l) { return std::abs(l + 0.5 * g); });
  order[2] = pick([](cplx) { return 0.0; });
  order[3] = pick([](cplx) { return 0.0; });

  const Mat4& vecs = solver.eigenvectors();
  if (previous != nullptr) {
    const double keep = overlap(previous->right.col(2), vecs.col(order[2])) +
                        overlap(previous->right.col(3), vecs.col(order[3]));
    const double swap = overlap(previous->right.col(2), vecs.col(order[3])) +
                        overlap(previous->right.col(3), vecs.col(order[2]));
    if (swap > keep) std::swap(order[2], order[3]);
  } else {
    const cplx a = ev(order[2]);
    const cplx b = ev(order[3]);
    const bool imag_split = std::abs(a.imag() - b.imag()) > rel_tol * scale;
    if (imag_split ? b.imag() > a.imag() : b.real() > a.real()) std::swap(order[2], order[3]);
  }

  SpectralData s;
  for (int j = 0; j < 4; ++j) {
    s.eigenvalues[static_cast<std::size_t>(j)] = ev(order[static_cast<std::size_t>(j)]);
    s.right.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  s.left = s.right.inverse();

  // v1 = (1,1,0,0) and v2 = (0,0,1,1) exactly, up to round-off in the solve.
  rescale(s.left, s.right, 0, s.left(0, 0));
  rescale(s.left, s.right, 1, s.left(1, 2));
  for (int j = 2; j < 4; ++j) {
    const double n = s.right.col(j).norm();
    cplx phase;
    if (previous != nullptr) {
      const cplx o = previous->right.col(j).dot(s.right.col(j));
      phase = std::abs(o) > 0.0 ? o / std::abs(o) : cplx(1.0);
    } else {
      Eigen::Index k = 0;
      s.right.col(j).cwiseAbs().maxCoeff(&k);
      phase = s.right(k, j) / std::abs(s.right(k, j));
    }
    rescale(s.left, s.right, j, 1.0 / (n * phase));
  }
  for (int j = 0; j < 4; ++j) {
    s.norms[static_cast<std::size_t>(j)] = s.left.row(j) * s.right.col(j);
  }
  return s;
}

}  // namespace qcal
