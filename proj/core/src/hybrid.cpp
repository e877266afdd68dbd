#include "qcal/hybrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"
#include "qcal/rates.hpp"

namespace qcal {

namespace {

constexpr double kMaxLeak = 1e-6;
constexpr double kCfl = 0.5;

double min_eigenvalue(const Mat2& r) {
  const double a = r(0, 0).real();
  const double d = r(1, 1).real();
  const cplx b = 0.5 * (r(0, 1) + std::conj(r(1, 0)));
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
}

void symmetrize(Mat2& r) {
  const cplx off = 0.5 * (r(0, 1) + std::conj(r(1, 0)));
  r(0, 0) = r(0, 0).real();
  r(1, 1) = r(1, 1).real();
  r(0, 1) = off;
  r(1, 0) = std::conj(off);
}

}  // namespace

std::size_t XGrid::nearest(double x) const {
  const double k = std::round((x - x_min) / dx);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), n - 1);
}

XGrid build_grid(const PhysicalParams& params, double x_min, double x_max, int m) {
  if (m < 1) throw ConfigError("grid subdivision m must be >= 1");
  if (!(x_min >= 0.0)) throw ConfigError("grid x_min must be >= 0");
  const double dxq = params.jump_quantum();
  if (!(x_max - x_min >= 3.0 * dxq)) {
    std::ostringstream os;
    os << "grid too small: x_max - x_min = " << x_max - x_min << " K^2 < 3 dX_q = " << 3.0 * dxq
       << " K^2";
    throw ConfigError(os.str());
  }
  XGrid g;
  g.x_min = x_min;
  g.m = m;
  g.dx = dxq / m;
  g.n = static_cast<std::size_t>(std::floor((x_max - x_min) / g.dx + 1e-9)) + 1;
  return g;
}

double HybridDensity::total_mass() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.trace().real();
  return s * grid.dx;
}

HybridDensity gibbs_point_density(const XGrid& grid, const PhysicalParams& params, double x0) {
  HybridDensity rho;
  rho.grid = grid;
  rho.blocks.assign(grid.n, Mat2::Zero());
  const double b = params.level_spacing / (constants::k_B * params.phonon_temp);
  const double pe = std::exp(-b) / (1.0 + std::exp(-b));
  auto& block = rho.blocks[grid.nearest(x0)];
  block(0, 0) = pe / grid.dx;
  block(1, 1) = (1.0 - pe) / grid.dx;
  return rho;
}

double StabilityLimits::max() const { return std::max({rate, drift, diffusion, coherent}); }

HybridGenerator::HybridGenerator(const XGrid& grid, const PhysicalParams& params, Frame frame)
    : grid_(grid), params_(params), frame_(frame) {
  if (frame == Frame::rotating && !params.resonant()) {
    throw ConfigError("rotating frame requires a resonant drive (drive_frequency = omega)");
  }
  const std::size_t n = grid.n;
  down_.resize(n);
  up_.resize(n);
  limits_ = {};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = jump_rates(grid.node(i), params);
    down_[i] = r.down;
    up_[i] = r.up;
    limits_.rate = std::max(limits_.rate, r.total());
  }
  face_drift_.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    face_drift_[i] = phonon_coefficients(grid.node(i) + 0.5 * grid.dx, params).drift;
    limits_.drift = std::max(limits_.drift, std::abs(face_drift_[i]) / grid.dx);
  }
  diffusion_ = 0.5 * phonon_coefficients(grid.x_min, params).diffusion;
  limits_.diffusion = 2.0 * diffusion_ / (grid.dx * grid.dx);
  const Mat2 h = drive_hamiltonian(0.0, params, frame) / constants::hbar;
  limits_.coherent = 2.0 * std::sqrt(std::norm(h(0, 0)) + std::norm(h(0, 1)));
}

double HybridGenerator::apply(const std::vector<Mat2>& rho, double t, std::vector<Mat2>& out) const {
  const std::size_t n = grid_.n;
  const std::size_t m = static_cast<std::size_t>(grid_.m);
  const double dx = grid_.dx;
  out.resize(n);
  const Mat2 h = drive_hamiltonian(t, params_, frame_) / constants::hbar;
  const double split = h(0, 0).real() - h(1, 1).real();
  const double hr = h(0, 1).real(), hi = h(0, 1).imag();

  // Blocks are Hermitian: only rho_00, rho_11 and rho_01 are read, and the
  // output is written Hermitian.
  double leak_rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2& r = rho[i];
    const double p = r(0, 0).real(), q = r(1, 1).real();
    const double cr = r(0, 1).real(), ci = r(0, 1).imag();
    const double gd = down_[i];
    const double gu = up_[i];
    // -i[h, r]: population exchange 2 Im(h01 conj(c)); coherence
    // -i (split c + h01 (q - p)).
    const double exchange = 2.0 * (hi * cr - hr * ci);
    double dp = exchange - gd * p;
    double dq = -exchange - gu * q;
    const double half = 0.5 * (gd + gu);
    const double dcr = split * ci + hi * (q - p) - half * cr;
    const double dci = -split * cr - hr * (q - p) - half * ci;
    // Reinjection: emission from X - dX_q lands in the ground state here,
    // absorption from X + dX_q lands in the excited state here.
    if (i >= m) dq += down_[i - m] * rho[i - m](0, 0).real();
    if (i + m < n) dp += up_[i + m] * rho[i + m](1, 1).real();
    if (i + m >= n) leak_rate += gd * p;
    if (i < m) leak_rate += gu * q;
    Mat2& d = out[i];
    d(0, 0) = dp;
    d(1, 1) = dq;
    d(0, 1) = cplx(dcr, dci);
    d(1, 0) = cplx(dcr, -dci);
  }

  // Conservative classical transport: upwind drift plus centered diffusion,
  // zero flux through both ends. Fluxes act on (rho_00, rho_11, Re rho_01, Im rho_01).
  const double inv_dx = 1.0 / dx;
  const double dd = diffusion_ * inv_dx;
  auto components = [&rho](std::size_t i) {
    const Mat2& r = rho[i];
    return std::array<double, 4>{r(0, 0).real(), r(1, 1).real(), r(0, 1).real(), r(0, 1).imag()};
  };
  std::array<double, 4> prev{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> here = components(0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::array<double, 4> next = components(i + 1);
    const double f = face_drift_[i];
    const std::array<double, 4>& up = f > 0.0 ? here : next;
    std::array<double, 4> flux;
    for (int k = 0; k < 4; ++k) flux[k] = f * up[k] - dd * (next[k] - here[k]);
    Mat2& d = out[i];
    d(0, 0) -= (flux[0] - prev[0]) * inv_dx;
    d(1, 1) -= (flux[1] - prev[1]) * inv_dx;
    const cplx dc((flux[2] - prev[2]) * inv_dx, (flux[3] - prev[3]) * inv_dx);
    d(0, 1) -= dc;
    d(1, 0) -= std::conj(dc);
    prev = flux;
    here = next;
  }
  if (n > 0) {
    Mat2& d = out[n - 1];
    d(0, 0) += prev[0] * inv_dx;
    d(1, 1) += prev[1] * inv_dx;
    const cplx dc(prev[2] * inv_dx, prev[3] * inv_dx);
    d(0, 1) += dc;
    d(1, 0) += std::conj(dc);
  }
  return leak_rate * dx;
}

std::vector<Mat2> apply_generator(const HybridDensity& rho, double t, const PhysicalParams& params,
                                  Frame frame) {
  HybridGenerator gen(rho.grid, params, frame);
  std::vector<Mat2> out;
  gen.apply(rho.blocks, t, out);
  return out;
}

HybridDensity evolve(const HybridDensity& rho0, double t0, double t1, double dt_me,
                     const PhysicalParams& params, Frame frame, EvolveReport* report) {
  if (!(dt_me > 0.0) || !(t1 >= t0)) throw ConfigError("evolve: need dt_me > 0 and t1 >= t0");
  HybridGenerator gen(rho0.grid, params, frame);
  const auto& lim = gen.limits();
  if (!(dt_me * lim.max() < kCfl)) {
    std::ostringstream os;
    os << "hybrid ME step too large: dt_me = " << dt_me << " s; dt_me * limit must be < " << kCfl
       << " for rate " << lim.rate << ", drift " << lim.drift << ", diffusion " << lim.diffusion
       << ", coherent " << lim.coherent << " (1/s)";
    throw StabilityError(os.str());
  }

  HybridDensity rho = rho0;
  const std::size_t n = rho.grid.n;
  const double dx = rho.grid.dx;
  const double mass0 = rho0.total_mass() + rho0.leak;
  std::vector<Mat2> k1, k2, k3, k4, tmp(n);
  EvolveReport rep;
  rep.limits = lim;
  rep.min_eigenvalue = 0.0;
  for (const auto& b : rho.blocks) rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_eigenvalue(b) * dx);

  const auto steps = static_cast<std::uint64_t>(std::ceil((t1 - t0) / dt_me - 1e-9));
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt_me;
    const double h = std::min(dt_me, t1 - t);
    const double l1 = gen.apply(rho.blocks, t, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = rho.blocks[i] + 0.5 * h * k1[i];
    const double l2 = gen.apply(tmp, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = rho.blocks[i] + 0.5 * h * k2[i];
    const double l3 = gen.apply(tmp, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = rho.blocks[i] + h * k3[i];
    const double l4 = gen.apply(tmp, t + h, k4);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Mat2& b = rho.blocks[i];
      b += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      symmetrize(b);
      mass += b(0, 0).real() + b(1, 1).real();
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_eigenvalue(b) * dx);
    }
    rho.leak += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    rep.max_trace_drift = std::max(rep.max_trace_drift, std::abs(mass * dx + rho.leak - mass0));
    if (rho.leak > kMaxLeak) {
      std::ostringstream os;
      os << "hybrid ME: probability leak " << rho.leak << " exceeds " << kMaxLeak << " at t = " << t + h
         << " s; extend the X grid";
      throw NumericalError(os.str());
    }
  }
  rep.steps = steps;
  rep.leak = rho.leak;
  if (report != nullptr) *report = rep;
  return rho;
}

Marginal marginal_and_validate(const HybridDensity& rho) {
  Marginal out;
  const auto& g = rho.grid;
  out.x.resize(g.n);
  out.f.resize(g.n);
  MarginalDiagnostics d{0.0, 0.0, 0.0, 0.0, rho.leak};
  bool first = true;
  for (std::size_t i = 0; i < g.n; ++i) {
    const Mat2& b = rho.blocks[i];
    out.x[i] = g.node(i);
    out.f[i] = b.trace().real();
    d.total_mass += out.f[i];
    const double tr = out.f[i] * g.dx;
    const double ev = min_eigenvalue(b) * g.dx;
    d.min_trace = first ? tr : std::min(d.min_trace, tr);
    d.min_eigenvalue = first ? ev : std::min(d.min_eigenvalue, ev);
    first = false;
    const double herm = std::max({std::abs(b(0, 0).imag()), std::abs(b(1, 1).imag()),
                                  std::abs(b(0, 1) - std::conj(b(1, 0)))}) * g.dx;
    d.hermiticity_residual = std::max(d.hermiticity_residual, herm);
  }
  d.total_mass *= g.dx;
  out.diagnostics = d;
  return out;
}

}  // namespace qcal
