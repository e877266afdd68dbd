#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "near.hpp"
#include "qcal/constants.hpp"
#include "qcal/errors.hpp"
#include "qcal/hybrid.hpp"
#include "qcal/rates.hpp"
#include "qcal/reduction.hpp"

using namespace qcal;

namespace {

PhysicalParams with(double g2, double kappa, double sigma_v = PhysicalParams::defaults().sigma_v) {
  PhysicalParams p = PhysicalParams::defaults();
  p.coupling = std::sqrt(g2);
  p.drive_strength = kappa;
  p.sigma_v = sigma_v;
  return p;
}

HybridDensity empty_density(const XGrid& g) {
  HybridDensity d;
  d.grid = g;
  d.blocks.assign(g.n, Mat2::Zero());
  return d;
}

// Random Hermitian positive blocks, normalized.
HybridDensity random_density(const XGrid& g, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HybridDensity d = empty_density(g);
  double mass = 0.0;
  for (auto& b : d.blocks) {
    const double p = u(gen), q = u(gen);
    const double r = 0.9 * std::sqrt(p * q) * u(gen), phi = 6.283 * u(gen);
    b(0, 0) = p;
    b(1, 1) = q;
    b(0, 1) = std::polar(r, phi);
    b(1, 0) = std::conj(b(0, 1));
    mass += p + q;
  }
  for (auto& b : d.blocks) b /= mass * g.dx;
  return d;
}

double total_trace_rate(const std::vector<Mat2>& d, double dx) {
  double s = 0.0;
  for (const auto& b : d) s += b.trace().real();
  return s * dx;
}

bool same_bits(const Mat2& a, const Mat2& b) { return std::memcmp(a.data(), b.data(), sizeof(cplx) * 4) == 0; }

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("jumps are exact node shifts") {
    const auto p = PhysicalParams::defaults();
    const double q = p.jump_quantum();
    for (int m : {1, 4, 7}) {
      const XGrid g = build_grid(p, 0.0, 0.16, m);
      CHECK(g.m == m);
      CHECK(g.dx * m == near(q, 1e-15));
      CHECK(g.node(static_cast<std::size_t>(m)) - g.node(0) == near(q, 1e-14));
      CHECK(g.x_max() <= 0.16);
      CHECK(g.x_max() + g.dx > 0.16);
      CHECK(g.n >= static_cast<std::size_t>(3 * m));
    }
  }

  TEST_CASE("default grid resolves the thermal width") {
    const auto p = PhysicalParams::defaults();
    const double tp2 = p.phonon_temp * p.phonon_temp;
    const XGrid g = build_grid(p, 0.0, 16.0 * tp2, 7);
    CHECK(g.dx <= tp2 / 200.0);
  }

  TEST_CASE("invalid grids") {
    const auto p = PhysicalParams::defaults();
    const double q = p.jump_quantum();
    CHECK_THROWS_AS(build_grid(p, 0.01, 0.01 + 2.9 * q, 2), ConfigError);
    CHECK_THROWS_AS(build_grid(p, -0.001, 0.1, 2), ConfigError);
    CHECK_THROWS_AS(build_grid(p, 0.0, 0.1, 0), ConfigError);
    CHECK_NOTHROW(build_grid(p, 0.01, 0.01 + 3.01 * q, 2));
  }
}

TEST_SUITE("generator") {
  TEST_CASE("total trace is conserved up to the tracked leak") {
    const auto p = PhysicalParams::defaults();
    for (Frame f : {Frame::lab, Frame::rotating}) {
      const XGrid g = build_grid(p, 0.02, 0.03, 3);
      const HybridDensity rho = random_density(g, 17);
      HybridGenerator gen(g, p, f);
      std::vector<Mat2> out;
      const double leak = gen.apply(rho.blocks, 3.3e-11, out);
      double scale = 0.0;
      for (const auto& b : out) scale = std::max(scale, b.cwiseAbs().maxCoeff() * g.dx);
      CHECK(leak > 0.0);
      CHECK(std::abs(total_trace_rate(out, g.dx) + leak) < 1e-12 * scale * g.n);
      for (const auto& b : out) CHECK((b - b.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("flat maximally mixed state is stationary without coupling") {
    const auto p = with(0.0, 0.0, 0.0);
    const XGrid g = build_grid(p, 0.0, 0.01, 2);
    HybridDensity rho = empty_density(g);
    for (auto& b : rho.blocks) b = Mat2::Identity() / (2.0 * g.n * g.dx);
    const auto out = apply_generator(rho, 0.0, p, Frame::rotating);
    CHECK(std::abs(total_trace_rate(out, g.dx)) < 1e-300);
  }

  TEST_CASE("an emission moves mass exactly m nodes up") {
    const auto p = with(0.1, 0.0, 0.0);
    const int m = 5;
    const XGrid g = build_grid(p, 0.02, 0.03, m);
    HybridDensity rho = empty_density(g);
    const std::size_t i = 7;
    rho.blocks[i](0, 0) = 1.0 / g.dx;
    const auto out = apply_generator(rho, 0.0, p, Frame::rotating);
    const double gd = jump_rates(g.node(i), p).down;
    CHECK(out[i](0, 0).real() == near(-gd / g.dx, 1e-14));
    CHECK(out[i + m](1, 1).real() == near(gd / g.dx, 1e-14));
    for (std::size_t k = 0; k < g.n; ++k) {
      if (k == i || k == i + m) continue;
      CHECK(out[k].cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("large calorimeter limit reduces to the thermal Lindblad relaxation rate") {
    // Oracle: for a flat field with populations (a, 1 - a) the node-wise
    // excited population obeys d p / dt = -G a + G_up, so its slope in a is -G.
    auto p = with(0.1, 0.0, 0.0);
    p.heat_capacity_coeff *= 1e7;
    const double x0 = 0.02;
    const XGrid g = build_grid(p, x0, x0 + 12 * p.jump_quantum(), 1);
    auto rate_at = [&](double a) {
      HybridDensity rho = empty_density(g);
      for (auto& b : rho.blocks) {
        b(0, 0) = a;
        b(1, 1) = 1.0 - a;
      }
      return apply_generator(rho, 0.0, p, Frame::rotating)[5](0, 0).real();
    };
    const double slope = rate_at(1.0) - rate_at(0.0);
    const double G = jump_rates(g.node(5), p).total();
    CHECK(std::abs(slope + G) / G < 1e-6);
  }
}

TEST_SUITE("evolve") {
  TEST_CASE("zero generator leaves the state bit-identical") {
    const auto p = with(0.0, 0.0, 0.0);
    const XGrid g = build_grid(p, 0.01, 0.02, 2);
    const HybridDensity rho = random_density(g, 5);
    const HybridDensity out = evolve(rho, 0.0, 1e-9, 1e-11, p, Frame::rotating);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(same_bits(out.blocks[i], rho.blocks[i]));
  }

  TEST_CASE("normalization drift over 1e5 steps") {
    const auto p = PhysicalParams::defaults();
    const double tp2 = p.phonon_temp * p.phonon_temp;
    const XGrid g = build_grid(p, 0.0, 16.0 * tp2, 1);
    const HybridDensity rho = gibbs_point_density(g, p, tp2);
    HybridGenerator gen(g, p, Frame::rotating);
    const double dt = 0.1 / gen.limits().max();
    EvolveReport rep;
    const HybridDensity out = evolve(rho, 0.0, 1e5 * dt, dt, p, Frame::rotating, &rep);
    CHECK(rep.steps == 100000);
    CHECK(rep.max_trace_drift < 1e-8);
    CHECK(rep.min_eigenvalue > -1e-8);
    const Marginal m = marginal_and_validate(out);
    CHECK(std::abs(m.diagnostics.total_mass + out.leak - 1.0) < 1e-8);
    CHECK(m.diagnostics.hermiticity_residual < 1e-12);
    for (double f : m.f) CHECK(f * g.dx >= -1e-8);
  }

  TEST_CASE("steps beyond the stability limit are refused") {
    const auto p = PhysicalParams::defaults();
    const XGrid g = build_grid(p, 0.0, 0.05, 2);
    HybridGenerator gen(g, p, Frame::lab);
    const double dt = 0.6 / gen.limits().max();
    CHECK_THROWS_AS(evolve(gibbs_point_density(g, p, 0.01), 0.0, 10 * dt, dt, p, Frame::lab), StabilityError);
  }

  TEST_CASE("probability leaving the grid aborts the run") {
    const auto p = PhysicalParams::defaults();
    const XGrid g = build_grid(p, 0.01, 0.01 + 4 * p.jump_quantum(), 1);
    HybridDensity rho = empty_density(g);
    rho.blocks[g.n - 1](0, 0) = 1.0 / g.dx;
    HybridGenerator gen(g, p, Frame::rotating);
    const double dt = 0.1 / gen.limits().max();
    CHECK_THROWS_AS(evolve(rho, 0.0, 1000 * dt, dt, p, Frame::rotating), NumericalError);
  }

  TEST_CASE("undriven stationary marginal matches the reduced stationary variance") {
    const auto p = with(0.1, 0.0);
    const double tp2 = p.phonon_temp * p.phonon_temp;
    const XGrid g = build_grid(p, tp2 - 0.0075, tp2 + 0.0095, 8);
    HybridGenerator gen(g, p, Frame::rotating);
    const double dt = 0.1 / gen.limits().max();
    EvolveReport rep;
    const HybridDensity out = evolve(gibbs_point_density(g, p, tp2), 0.0, 1.6e-5, dt, p, Frame::rotating, &rep);
    const Marginal m = marginal_and_validate(out);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m.x.size(); ++i) {
      m0 += m.f[i];
      m1 += m.f[i] * m.x[i];
      m2 += m.f[i] * m.x[i] * m.x[i];
    }
    const double var = m2 / m0 - (m1 / m0) * (m1 / m0);
    const double fp = stationary_distribution(fp_coefficients(m.x, p)).var_x;
    const double ou = 2 * constants::k_B * std::pow(p.phonon_temp, 3) / p.heat_capacity_coeff;
    MESSAGE("variance / FP = " << var / fp << ", variance / OU = " << var / ou);
    CHECK(var == near(fp, 0.05));
  }

  TEST_CASE("halving dX barely moves the driven stationary mean") {
    const auto p = PhysicalParams::defaults();
    auto mean_x = [&](int m) {
      const XGrid g = build_grid(p, 0.09, 0.15, m);
      HybridGenerator gen(g, p, Frame::rotating);
      const double dt = 0.1 / gen.limits().max();
      const HybridDensity out = evolve(gibbs_point_density(g, p, 0.119), 0.0, 5e-7, dt, p, Frame::rotating);
      const Marginal mg = marginal_and_validate(out);
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t i = 0; i < mg.x.size(); ++i) {
        s0 += mg.f[i];
        s1 += mg.f[i] * mg.x[i];
      }
      return s1 / s0;
    };
    const double coarse = mean_x(7);
    const double fine = mean_x(14);
    MESSAGE("relative mean shift = " << std::abs(fine - coarse) / fine);
    CHECK(std::abs(fine - coarse) / fine < 1e-3);
  }
}
