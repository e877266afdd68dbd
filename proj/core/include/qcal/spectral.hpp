#pragma once

#include <array>

#include "qcal/linalg.hpp"

namespace qcal {

/// Biorthogonal eigen-decomposition of m0.
///
/// Ordering: index 0 is the zero eigenvalue (left vector v1 = (1,1,0,0), right
/// vector Q), index 1 is -G/2 (left vector v2 = (0,0,1,1)), indices 2 and 3
/// are the remaining pair. Left vectors are the rows of `left`, right vectors
/// the columns of `right`; `norms[j]` is the bilinear pairing <v_j|w_j>.
struct SpectralData {
  std::array<cplx, 4> eigenvalues;
  Mat4 right;
  Mat4 left;
  std::array<cplx, 4> norms;

  /// |w_j><v_j| / <v_j|w_j>
  Mat4 projector(int j) const;
  /// max-norm of sum_j projector(j) - I
  double completeness_residual() const;
  /// sum_{j>=1} projector(j) / lambda_j, the inverse of m0 on its range.
  Mat4 reduced_resolvent() const;
};

/// Decomposes m0 (built by m0_matrix at temperature-squared `x`). When
/// `previous` is given, the pair at indices 2,3 is matched to it by maximal
/// eigenvector overlap and phases are aligned, so that projectors vary
/// smoothly along an X grid. Raises DegeneracyError naming `x` when any two
/// eigenvalues coincide within `rel_tol` * G.
SpectralData spectral_decomposition(const Mat4& m0, double x,
                                    const SpectralData* previous = nullptr,
                                    double rel_tol = 1e-6);

}  // namespace qcal
