#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "near.hpp"
#include "qcal/constants.hpp"
#include "qcal/errors.hpp"
#include "qcal/hamiltonian.hpp"
#include "qcal/liouvillian.hpp"
#include "qcal/params.hpp"
#include "qcal/rates.hpp"
#include "qcal/spectral.hpp"

using namespace qcal;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

PhysicalParams with(double g2, double kappa) {
  PhysicalParams p = PhysicalParams::defaults();
  p.coupling = std::sqrt(g2);
  p.drive_strength = kappa;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

// 50-digit evaluation of the thermal rates straight from their definition.
struct MpRates {
  mp down, up, beta;
};

MpRates mp_rates(double x, const PhysicalParams& p) {
  const mp beta = mp(p.level_spacing) / (mp(constants::k_B) * sqrt(mp(x)));
  const mp g2w = mp(p.coupling) * mp(p.coupling) * mp(p.level_spacing) / mp(constants::hbar);
  const mp e = exp(beta);
  return {g2w * e / (e - 1), g2w / (e - 1), beta};
}

// Coefficients c_k of det(zI - A) = z^4 + c_1 z^3 + ... + c_4 by the
// Faddeev-LeVerrier recursion.
std::array<std::complex<long double>, 5> charpoly(const Mat4& a) {
  using C = std::complex<long double>;
  Eigen::Matrix<C, 4, 4> A = a.cast<C>();
  Eigen::Matrix<C, 4, 4> M = Eigen::Matrix<C, 4, 4>::Zero();
  std::array<C, 5> c{};
  c[0] = 1;
  for (int k = 1; k <= 4; ++k) {
    M = A * M + c[k - 1] * Eigen::Matrix<C, 4, 4>::Identity();
    c[k] = -(A * M).trace() / static_cast<long double>(k);
  }
  return c;
}

std::complex<long double> eval_poly(const std::array<std::complex<long double>, 5>& c, cplx z) {
  std::complex<long double> acc = 0, zz(z.real(), z.imag());
  for (const auto& ck : c) acc = acc * zz + ck;
  return acc;
}

std::vector<double> x_grid(const PhysicalParams& p, std::size_t n, double hi = 0.36) {
  std::vector<double> xs;
  const double lo = 3.0 * p.jump_quantum();
  for (std::size_t i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return xs;
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("defaults carry the experiment constants") {
    const auto p = PhysicalParams::defaults();
    CHECK(p.level_spacing_K() == near(0.5, 1e-15));
    CHECK(p.heat_capacity_coeff == near(1500 * constants::k_B, 1e-15));
    CHECK(p.drive_strength == 0.05);
    CHECK(p.coupling_squared() == near(0.1, 1e-15));
    CHECK(p.sigma_v == near(2e-12, 1e-15));
    CHECK(p.phonon_temp == 0.1);
    CHECK(p.gamma_floor == 1.0);
    CHECK(p.resonant());
    CHECK(p.jump_quantum() == near(1.0 / 3000.0, 1e-14));
    CHECK(p.lambda() == near(0.05 * p.omega(), 1e-15));
  }

  TEST_CASE("validation rejects out-of-range fields") {
    auto p = PhysicalParams::defaults();
    p.level_spacing = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PhysicalParams::defaults();
    p.drive_strength = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PhysicalParams::defaults();
    p.phonon_temp = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PhysicalParams::defaults();
    p.drive_strength = 0.0;
    CHECK_NOTHROW(p.validate());
  }

  TEST_CASE("config text round-trips bit-exactly") {
    auto p = with(0.0731, 0.0123);
    p.drive_frequency *= 1.0000001;
    p.phonon_temp = 0.1234567890123;
    const auto back = params_from_text(to_config_text(p));
    CHECK(back == p);
    CHECK(back.drive_frequency == p.drive_frequency);
  }

  TEST_CASE("kelvin-unit keys and ratios") {
    const auto kv = KeyValueConfig::parse("level_spacing_K = 0.7\nheat_capacity_coeff_K = 1000\n"
                                          "drive_frequency_ratio = 0.95\ncoupling_squared = 0.2\n");
    const auto p = read_params(kv);
    CHECK(p.level_spacing_K() == near(0.7, 1e-15));
    CHECK(p.heat_capacity_coeff == near(1000 * constants::k_B, 1e-15));
    CHECK(p.drive_frequency == near(0.95 * p.omega(), 1e-15));
    CHECK(p.coupling_squared() == near(0.2, 1e-15));
    CHECK_FALSE(p.resonant());
    CHECK_THROWS_AS(read_params(KeyValueConfig::parse("level_spacing = 1e-23\nlevel_spacing_K = 0.5\n")),
                    ConfigError);
    CHECK_THROWS_AS(read_params(KeyValueConfig::parse("coupling = 0.3\ncoupling_squared = 0.09\n")),
                    ConfigError);
  }

  TEST_CASE("changing the level spacing keeps a resonant drive resonant") {
    const auto p = read_params(KeyValueConfig::parse("level_spacing_K = 0.8\n"));
    CHECK(p.resonant());
  }
}

TEST_SUITE("rates") {
  TEST_CASE("thermal rates agree with a 50-digit evaluation") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      auto p = with(0.01 + 0.49 * u(gen), 0.1 * u(gen));
      p.level_spacing = (0.1 + 1.9 * u(gen)) * constants::k_B;
      p.drive_frequency = p.omega();
      const double x = p.jump_quantum() * std::exp(std::log(1.0 / p.jump_quantum()) * u(gen)) * 1.0001;
      const auto r = jump_rates(x, p);
      const auto o = mp_rates(x, p);
      CHECK(rel(r.down, o.down.convert_to<double>()) < 1e-13);
      CHECK(rel(r.up, o.up.convert_to<double>()) < 1e-13);
      CHECK(rel(r.down / r.up, exp(o.beta).convert_to<double>()) < 1e-12);
      const double g2w = p.coupling_squared() * p.omega();
      CHECK(std::abs((r.down - r.up) - g2w) / g2w < 1e-12);
    }
  }

  TEST_CASE("below the jump quantum only the floor decay remains") {
    const auto p = PhysicalParams::defaults();
    for (double x : {0.0, 0.5 * p.jump_quantum(), p.jump_quantum()}) {
      const auto r = jump_rates(x, p);
      CHECK(r.down == p.gamma_floor);
      CHECK(r.up == 0.0);
    }
    CHECK(jump_rates(1.000001 * p.jump_quantum(), p).up > 0.0);
  }

  TEST_CASE("negative X is a domain error") {
    const auto p = PhysicalParams::defaults();
    CHECK_THROWS_AS(jump_rates(-1e-9, p), DomainError);
    CHECK_THROWS_AS(phonon_coefficients(-1e-9, p), DomainError);
  }

  TEST_CASE("kernel agrees exactly with the free functions") {
    const auto p = PhysicalParams::defaults();
    const RateKernel k(p);
    for (double x : x_grid(p, 200, 4.0)) {
      CHECK(k.rates(x).down == jump_rates(x, p).down);
      CHECK(k.rates(x).up == jump_rates(x, p).up);
      CHECK(k.phonon(x).drift == phonon_coefficients(x, p).drift);
    }
  }

  TEST_CASE("phonon coefficients") {
    const auto p = PhysicalParams::defaults();
    const double tp2 = p.phonon_temp * p.phonon_temp;
    const double scale = p.sigma_v * std::pow(p.phonon_temp, 5) / p.heat_capacity_coeff;
    CHECK(std::abs(phonon_coefficients(tp2, p).drift) < 1e-14 * scale);
    CHECK(phonon_coefficients(0.5 * tp2, p).drift > 0.0);
    CHECK(phonon_coefficients(2.0 * tp2, p).drift < 0.0);
    const double d0 = phonon_coefficients(0.001, p).diffusion;
    CHECK(phonon_coefficients(0.3, p).diffusion == d0);
    const double expect = 10 * constants::k_B * p.sigma_v * std::pow(p.phonon_temp, 6) /
                          (p.heat_capacity_coeff * p.heat_capacity_coeff);
    CHECK(rel(d0, expect) < 1e-14);
  }
}

TEST_SUITE("hamiltonian") {
  TEST_CASE("lab frame at t = 0") {
    const auto p = PhysicalParams::defaults();
    const double hw = p.level_spacing;
    const Mat2 expect = 0.5 * hw * pauli::z() + p.drive_strength * hw * pauli::x();
    CHECK((drive_hamiltonian(0.0, p, Frame::lab) - expect).cwiseAbs().maxCoeff() < 1e-15 * hw);
  }

  TEST_CASE("hermitian at all times") {
    auto p = PhysicalParams::defaults();
    p.drive_frequency *= 0.93;
    for (double t : {0.0, 1.3e-11, 7.7e-10, 3.1e-6}) {
      const Mat2 h = drive_hamiltonian(t, p, Frame::lab);
      CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("rotating frame requires resonance") {
    auto p = PhysicalParams::defaults();
    const Mat2 h = drive_hamiltonian(1e-9, p, Frame::rotating);
    CHECK((h - p.drive_strength * p.level_spacing * pauli::x()).cwiseAbs().maxCoeff() < 1e-40);
    p.drive_frequency *= 1.01;
    CHECK_THROWS_AS(drive_hamiltonian(0.0, p, Frame::rotating), ConfigError);
    CHECK_THROWS_AS(frame_from_string("lab-ish"), ConfigError);
  }

  TEST_CASE("one drive period of lab propagation equals the rotating frame") {
    // Oracle: RK4 on dU/dt = -i H_lab(t) U / hbar with 20000 steps, against
    // exp(-i omega T sigma_z / 2) exp(-i kappa omega T sigma_x).
    const auto p = PhysicalParams::defaults();
    const double w = p.omega();
    const double period = 2.0 * M_PI / p.drive_frequency;
    const int steps = 20000;
    const double dt = period / steps;
    const cplx I(0.0, 1.0);
    auto rhs = [&](double t, const Mat2& u) -> Mat2 {
      return -I * drive_hamiltonian(t, p, Frame::lab) * u / constants::hbar;
    };
    Mat2 u = Mat2::Identity();
    for (int s = 0; s < steps; ++s) {
      const double t = s * dt;
      const Mat2 k1 = rhs(t, u);
      const Mat2 k2 = rhs(t + dt / 2, u + dt / 2 * k1);
      const Mat2 k3 = rhs(t + dt / 2, u + dt / 2 * k2);
      const Mat2 k4 = rhs(t + dt, u + dt * k3);
      u += dt / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double th = p.drive_strength * w * period;
    const Mat2 rot = std::cos(th) * Mat2::Identity() - I * std::sin(th) * pauli::x();
    // Sanity of the rotating generator itself.
    const Mat2 hr = drive_hamiltonian(0.0, p, Frame::rotating) / constants::hbar;
    CHECK((hr - p.drive_strength * w * pauli::x()).cwiseAbs().maxCoeff() < 1e-6);
    Mat2 frame = Mat2::Zero();
    frame(0, 0) = std::exp(-I * 0.5 * w * period);
    frame(1, 1) = std::exp(I * 0.5 * w * period);
    const Mat2 diff = u - frame * rot;
    const double op_norm = Eigen::JacobiSVD<Mat2>(diff).singularValues()(0);
    CHECK(op_norm < 1e-10);
  }
}

TEST_SUITE("liouvillian") {
  TEST_CASE("m0 structure on a grid") {
    for (auto [g2, kappa] : {std::pair{0.1, 0.05}, {0.05, 0.0}, {0.3, 0.1}}) {
      const auto p = with(g2, kappa);
      for (double x : x_grid(p, 100)) {
        const Mat4 m0 = m0_matrix(x, p);
        const auto r = jump_rates(x, p);
        const double G = r.total();
        const double scale = max_abs(m0);
        CHECK((v1_row() * m0).cwiseAbs().maxCoeff() <= 1e-14 * scale);
        // v2 m0 = -(G/2) v2 by direct multiplication.
        const Row4 v2m = v2_row() * m0;
        CHECK((v2m + 0.5 * G * v2_row()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
        CHECK(std::abs(m0.trace() + 2.0 * G) <= 1e-14 * G);
        // Population sector at lambda = 0 is a two-state Markov generator.
        if (kappa == 0.0) {
          CHECK(m0(0, 1).real() >= 0.0);
          CHECK(m0(1, 0).real() >= 0.0);
          CHECK(std::abs(m0(0, 0) + m0(1, 0)) <= 1e-14 * G);
          CHECK(std::abs(m0(0, 1) + m0(1, 1)) <= 1e-14 * G);
        }
      }
    }
  }

  TEST_CASE("higher-order blocks") {
    const auto p = PhysicalParams::defaults();
    const double x = 0.05;
    const auto r = jump_rates(x, p);
    const double q = p.jump_quantum();
    const Mat4 m1 = mn_matrix(1, x, p);
    const Mat4 m2 = mn_matrix(2, x, p);
    const Mat4 m3 = mn_matrix(3, x, p);
    CHECK(m1(1, 0).real() == near(-q * r.down, 1e-15));
    CHECK(m1(0, 1).real() == near(q * r.up, 1e-15));
    CHECK(m2(1, 0).real() == near(q * q * r.down, 1e-15));
    CHECK(m3(1, 0).real() == near(-q * q * q * r.down, 1e-15));
    for (const Mat4* m : {&m1, &m2, &m3}) {
      Mat4 rest = *m;
      rest(0, 1) = 0.0;
      rest(1, 0) = 0.0;
      CHECK(max_abs(rest) == 0.0);
    }
    CHECK_THROWS_AS(mn_matrix(0, x, p), DomainError);
  }

  TEST_CASE("kernel vector") {
    const auto p = PhysicalParams::defaults();
    for (double x : x_grid(p, 100)) {
      const Mat4 m0 = m0_matrix(x, p);
      const Vec4 q = q_vector(x, p);
      CHECK((m0 * q).cwiseAbs().maxCoeff() < 1e-12 * max_abs(m0));
      CHECK(std::abs(q(0) + q(1) - 1.0) < 1e-15);
    }
    const auto undriven = with(0.1, 0.0);
    const auto r = jump_rates(0.02, undriven);
    const Vec4 q0 = q_vector(0.02, undriven);
    CHECK(q0(0).real() == near(r.up / r.total(), 1e-14));
    CHECK(q0(1).real() == near(r.down / r.total(), 1e-14));
    CHECK(std::abs(q0(2)) == 0.0);
    const Vec4 qs = q_vector(0.02, with(0.1, 1e6));
    CHECK(qs(0).real() == near(0.5, 1e-9));
    CHECK(qs(1).real() == near(0.5, 1e-9));
    CHECK(std::abs(qs(2)) < 1e-5);
    CHECK_THROWS_AS(q_vector(0.02, with(0.0, 0.0)), NumericalError);
  }
}

TEST_SUITE("spectral") {
  TEST_CASE("eigenvalues are roots of the characteristic polynomial") {
    const auto p = PhysicalParams::defaults();
    for (double x : x_grid(p, 100)) {
      const Mat4 m0 = m0_matrix(x, p);
      const double G = jump_rates(x, p).total();
      const auto sd = spectral_decomposition(m0, x);
      const auto c = charpoly(m0);
      const long double g4 = std::pow(static_cast<long double>(G), 4);
      CHECK(std::abs(eval_poly(c, 0.0)) / g4 < 1e-10);
      CHECK(std::abs(eval_poly(c, -0.5 * G)) / g4 < 1e-10);
      for (const auto& l : sd.eigenvalues) CHECK(std::abs(eval_poly(c, l)) / g4 < 1e-9);
      CHECK(std::abs(sd.eigenvalues[0]) < 1e-10 * G);
      CHECK(std::abs(sd.eigenvalues[1] + 0.5 * G) < 1e-10 * G);
      cplx sum = 0.0;
      for (const auto& l : sd.eigenvalues) sum += l;
      CHECK(std::abs(sum + 2.0 * G) < 1e-10 * G);
      CHECK(sd.completeness_residual() < 1e-9);
      CHECK((sd.left.row(0) - v1_row()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((sd.left.row(1) - v2_row()).cwiseAbs().maxCoeff() < 1e-12);
      // Right null vector is proportional to Q.
      const Vec4 w0 = sd.right.col(0) / (sd.right(0, 0) + sd.right(1, 0));
      CHECK((w0 - q_vector(x, p)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("projectors vary continuously along a grid") {
    const auto p = PhysicalParams::defaults();
    const auto xs = x_grid(p, 400, 0.2);
    SpectralData prev = spectral_decomposition(m0_matrix(xs[0], p), xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const SpectralData cur = spectral_decomposition(m0_matrix(xs[i], p), xs[i], &prev);
      for (int j = 2; j < 4; ++j) {
        CHECK(max_abs(cur.projector(j) - prev.projector(j)) < 0.05);
        CHECK(std::abs(cur.eigenvalues[j] - prev.eigenvalues[j]) < 0.05 * std::abs(prev.eigenvalues[j]));
      }
      prev = cur;
    }
  }

  TEST_CASE("collisions raise a degeneracy error naming X") {
    // Undriven: the coherence pair both sit at -G/2.
    const auto p0 = with(0.1, 0.0);
    try {
      spectral_decomposition(m0_matrix(0.02, p0), 0.02);
      FAIL("expected DegeneracyError");
    } catch (const DegeneracyError& e) {
      CHECK(e.x() == 0.02);
    }
    // Exceptional point lambda = G/8.
    const auto p = PhysicalParams::defaults();
    double lo = 3 * p.jump_quantum(), hi = 4.0;
    auto f = [&](double x) { return jump_rates(x, p).total() / 8.0 - p.lambda(); };
    REQUIRE(f(lo) * f(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
    }
    CHECK_THROWS_AS(spectral_decomposition(m0_matrix(lo, p), lo), DegeneracyError);
  }
}
