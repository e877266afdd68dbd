#include "qcal/liouvillian.hpp"

#include <cmath>
#include <string>

#include "qcal/errors.hpp"

namespace qcal {

namespace {

constexpr cplx I(0.0, 1.0);

Mat4 build_m0(const JumpRates& r, double l) {
  const double g = r.total();
  Mat4 m;
  m << -r.down, r.up, I * l, -I * l,
       r.down, -r.up, -I * l, I * l,
       I * l, -I * l, -0.5 * g, 0.0,
       -I * l, I * l, 0.0, -0.5 * g;
  return m;
}

Mat4 build_mn(int n, const JumpRates& r, double dxq) {
  Mat4 m = Mat4::Zero();
  const double scale = std::pow(dxq, n);
  m(0, 1) = scale * r.up;
  m(1, 0) = (n % 2 == 0 ? scale : -scale) * r.down;
  return m;
}

Vec4 build_q(const JumpRates& r, double l, double x) {
  const double g = r.total();
  const double denom = g * g + 8.0 * l * l;
  if (!(denom > 0.0)) {
    throw NumericalError("q_vector: G = lambda = 0 at X = " + std::to_string(x) +
                         ", stationary state is not unique");
  }
  const double coh = 2.0 * l * (r.down - r.up);
  Vec4 q;
  q << (r.up * g + 4.0 * l * l) / denom, (r.down * g + 4.0 * l * l) / denom, -I * coh / denom,
      I * coh / denom;
  return q;
}

}  // namespace

Mat4 m0_matrix(double x, const PhysicalParams& p) {
  return build_m0(jump_rates(x, p), p.lambda());
}

Mat4 mn_matrix(int n, double x, const PhysicalParams& p) {
  if (n < 1) throw DomainError("mn_matrix: order must be >= 1, use m0_matrix for n = 0");
  return build_mn(n, jump_rates(x, p), p.jump_quantum());
}

Vec4 q_vector(double x, const PhysicalParams& p) {
  return build_q(jump_rates(x, p), p.lambda(), x);
}

LiouvillianBlocks liouvillian_blocks(double x, const PhysicalParams& p) {
  const auto r = jump_rates(x, p);
  const double l = p.lambda();
  const double dxq = p.jump_quantum();
  return {r, l, build_m0(r, l), build_mn(1, r, dxq), build_mn(2, r, dxq), build_q(r, l, x)};
}

}  // namespace qcal
