#pragma once

#include <complex>

#include <Eigen/Core>

namespace qcal {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Vec2 = Eigen::Matrix<cplx, 2, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Row4 = Eigen::Matrix<cplx, 1, 4>;

// Qubit basis: index 0 is the excited state phi_+ (sigma_z = +1), index 1 the
// ground state phi_-.
namespace pauli {
inline Mat2 z() { return (Mat2() << 1, 0, 0, -1).finished(); }
inline Mat2 x() { return (Mat2() << 0, 1, 1, 0).finished(); }
inline Mat2 plus() { return (Mat2() << 0, 1, 0, 0).finished(); }   // sigma_+
inline Mat2 minus() { return (Mat2() << 0, 0, 1, 0).finished(); }  // sigma_-
}  // namespace pauli

}  // namespace qcal
