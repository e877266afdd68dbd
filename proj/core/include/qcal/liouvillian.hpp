#pragma once

#include "qcal/linalg.hpp"
#include "qcal/params.hpp"
#include "qcal/rates.hpp"

namespace qcal {

// Vectorized qubit density: P = (rho_00, rho_11, rho_01, rho_10) with index 0
// the excited state. The Lindblad generator at fixed X acts as dP/dt = m0 P.

/// The order-zero generator: thermal Lindblad dynamics at fixed X with the
/// resonant drive element lambda = kappa omega. v1 = (1,1,0,0) is a left null
/// vector and v2 = (0,0,1,1) a left eigenvector with eigenvalue -G/2.
Mat4 m0_matrix(double x, const PhysicalParams& params);

/// Higher-order generator of the jump-size expansion, n >= 1. Only entries
/// (0,1) = dX_q^n G_up and (1,0) = (-dX_q)^n G_down are nonzero; the powers of
/// the jump quantum dX_q = hbar omega / C are folded in so that every quantity
/// built from these blocks is in X units. n < 1 raises DomainError.
Mat4 mn_matrix(int n, double x, const PhysicalParams& params);

/// Normalized stationary state of m0 (Q_0 + Q_1 = 1):
///   Q = (G_up G + 4 l^2, G_down G + 4 l^2, -2i l (G_down - G_up), 2i l (G_down - G_up)) / (G^2 + 8 l^2).
/// Raises NumericalError when G = lambda = 0 (the kernel is two-dimensional).
Vec4 q_vector(double x, const PhysicalParams& params);

/// Everything the reduction needs at one X.
struct LiouvillianBlocks {
  JumpRates rates;
  double lambda;
  Mat4 m0;
  Mat4 m1;
  Mat4 m2;
  Vec4 q;
};

LiouvillianBlocks liouvillian_blocks(double x, const PhysicalParams& params);

inline Row4 v1_row() { return (Row4() << 1, 1, 0, 0).finished(); }
inline Row4 v2_row() { return (Row4() << 0, 0, 1, 1).finished(); }

}  // namespace qcal
