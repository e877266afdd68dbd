#include "qcal/reduction.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"
#include "qcal/rates.hpp"
#include "qcal/spectral.hpp"

namespace qcal {

namespace {

void require_above_threshold(double x, const PhysicalParams& p, const char* who) {
  if (!(x > p.jump_quantum())) {
    std::ostringstream os;
    os << who << ": X = " << x << " K^2 must exceed the jump quantum " << p.jump_quantum() << " K^2";
    throw DomainError(os.str());
  }
}

// K(X) = <v1| m1 M# for the chosen route. `anchor` carries the spectral data
// of the stencil centre so neighbours are continuity-matched to it.
Row4 k_row(const LiouvillianBlocks& b, double x, CorrectionRoute route, const SpectralData* anchor,
           SpectralData* out_spectral) {
  const Row4 v1m1 = v1_row() * b.m1;
  if (route == CorrectionRoute::resolvent) return v1m1 * group_inverse(b);
  SpectralData s = spectral_decomposition(b.m0, x, anchor);
  if (out_spectral != nullptr) *out_spectral = s;
  return v1m1 * s.reduced_resolvent();
}

}  // namespace

Mat4 group_inverse(const LiouvillianBlocks& b) {
  // The projector onto ker(m0) is scaled by G so that m0 - G Q v1 is well
  // conditioned: its spectrum is {-G} together with the nonzero part of m0's.
  const double g = b.rates.total();
  const Mat4 p = b.q * v1_row();
  return (b.m0 - g * p).inverse() + p / g;
}

double j1_numeric(double x, const PhysicalParams& params) {
  require_above_threshold(x, params, "j1_numeric");
  const auto b = liouvillian_blocks(x, params);
  return -(v1_row() * b.m1 * b.q)(0, 0).real();
}

double j1_closed_form(double x, const PhysicalParams& p) {
  const double hw = p.level_spacing;
  const double w = p.omega();
  const double g2 = p.coupling_squared();
  const double k2 = p.drive_strength * p.drive_strength;
  if (g2 == 0.0 || k2 == 0.0) return 0.0;
  const double coth = 1.0 / std::tanh(hw / (2.0 * constants::k_B * std::sqrt(x)));
  return hw * w * g2 * 4.0 * k2 / (g2 * g2 * coth * coth + 8.0 * k2) / p.heat_capacity_coeff;
}

Corrections corrections(double x, const PhysicalParams& params, const CorrectionOptions& opt) {
  const double h = opt.rel_step * x;
  if (!(h > 0.0)) throw ConfigError("corrections: rel_step must be > 0");
  require_above_threshold(x - h, params, "corrections");

  const auto b0 = liouvillian_blocks(x, params);
  const auto bm = liouvillian_blocks(x - h, params);
  const auto bp = liouvillian_blocks(x + h, params);

  SpectralData centre;
  const Row4 k0 = k_row(b0, x, opt.route, nullptr, &centre);
  const SpectralData* anchor = opt.route == CorrectionRoute::spectral ? &centre : nullptr;
  const Row4 km = k_row(bm, x - h, opt.route, anchor, nullptr);
  const Row4 kp = k_row(bp, x + h, opt.route, anchor, nullptr);

  const Vec4 u = b0.m1 * b0.q;
  const Row4 dk = (kp - km) / (2.0 * h);
  const Vec4 dq = (bp.q - bm.q) / (2.0 * h);
  const double f = phonon_coefficients(x, params).drift;

  Corrections c;
  c.j2 = (-(dk * u)(0, 0) - f * (k0 * dq)(0, 0)).real();
  c.delta1 = 0.5 * (v1_row() * b0.m2 * b0.q)(0, 0).real();
  c.delta2 = -(k0 * u)(0, 0).real();
  return c;
}

FPPoint fp_point(double x, const PhysicalParams& params, const CorrectionOptions& opt) {
  const auto ph = phonon_coefficients(x, params);
  // Uncoupled: every m_n vanishes, and m0 has no decay to invert.
  const bool coupled = params.coupling != 0.0;
  const auto c = coupled ? corrections(x, params, opt) : Corrections{0.0, 0.0, 0.0};
  FPPoint pt;
  pt.x = x;
  pt.phonon_drift = ph.drift;
  pt.phonon_diffusion = ph.diffusion;
  pt.j1 = coupled ? j1_numeric(x, params) : 0.0;
  pt.j2 = c.j2;
  pt.delta1 = c.delta1;
  pt.delta2 = c.delta2;
  pt.b = ph.drift + pt.j1 + pt.j2;
  pt.d = 0.5 * ph.diffusion + pt.delta1 + pt.delta2;
  return pt;
}

std::vector<double> uniform_nodes(double x_min, double x_max, std::size_t n) {
  if (n < 2 || !(x_max > x_min)) throw ConfigError("uniform_nodes: need n >= 2 and x_max > x_min");
  std::vector<double> x(n);
  const double dx = (x_max - x_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = x_min + static_cast<double>(i) * dx;
  x[n - 1] = x_max;
  return x;
}

FPCoefficients fp_coefficients(const std::vector<double>& nodes, const PhysicalParams& params,
                               const CorrectionOptions& opt) {
  if (nodes.size() < 2) throw ConfigError("fp_coefficients: need at least 2 nodes");
  const double floor = 2.0 * params.jump_quantum();
  FPCoefficients out;
  out.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] > floor)) {
      std::ostringstream os;
      os << "fp_coefficients: node X = " << nodes[i] << " K^2 must exceed 2 dX_q = " << floor << " K^2";
      throw ConfigError(os.str());
    }
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw ConfigError("fp_coefficients: nodes must increase");
    out.nodes.push_back(fp_point(nodes[i], params, opt));
    if (!(out.nodes.back().d > 0.0)) {
      std::ostringstream os;
      os << "fp_coefficients: diffusion D = " << out.nodes.back().d << " <= 0 at X = " << nodes[i];
      throw NumericalError(os.str());
    }
  }
  return out;
}

StationaryDensity stationary_distribution(const FPCoefficients& coeffs) {
  const auto& nd = coeffs.nodes;
  const std::size_t n = nd.size();
  if (n < 2) throw ConfigError("stationary_distribution: need at least 2 nodes");
  for (const auto& p : nd) {
    if (!(p.d > 0.0)) throw NumericalError("stationary_distribution: D must be > 0");
  }
  std::vector<double> logf(n);
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      integral += 0.5 * (nd[i].x - nd[i - 1].x) * (nd[i].b / nd[i].d + nd[i - 1].b / nd[i - 1].d);
    }
    logf[i] = integral - std::log(nd[i].d);
  }
  const double peak = *std::max_element(logf.begin(), logf.end());

  StationaryDensity s;
  s.x.resize(n);
  s.f.resize(n);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (nd[i + 1].x - nd[i].x);
    w[i] += half;
    w[i + 1] += half;
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] = nd[i].x;
    s.f[i] = std::exp(logf[i] - peak);
    norm += w[i] * s.f[i];
  }
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericalError("stationary_distribution: normalization failed");
  }
  double mx = 0.0, mt = 0.0, mt2 = 0.0;
  std::size_t mode = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.f[i] /= norm;
    mx += w[i] * s.f[i] * s.x[i];
    mt += w[i] * s.f[i] * std::sqrt(s.x[i]);
    mt2 += w[i] * s.f[i] * s.x[i];
    if (s.f[i] > s.f[mode]) mode = i;
  }
  double vx = 0.0;
  for (std::size_t i = 0; i < n; ++i) vx += w[i] * s.f[i] * (s.x[i] - mx) * (s.x[i] - mx);
  s.mean_x = mx;
  s.var_x = vx;
  s.mean_t = mt;
  s.std_t = std::sqrt(std::max(0.0, mt2 - mt * mt));
  s.mode_x = s.x[mode];
  return s;
}

StationaryRoots stationary_temperature(const FPCoefficients& coeffs, const PhysicalParams& params,
                                       const CorrectionOptions& opt) {
  const auto& nd = coeffs.nodes;
  StationaryRoots roots;
  auto b_at = [&](double x) { return fp_point(x, params, opt).b; };
  const std::size_t n = nd.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (nd[i].b == 0.0) {
      // A root exactly on a node; stable when b decreases through it.
      const double before = i > 0 ? nd[i - 1].b : 0.0;
      const double after = i + 1 < n ? nd[i + 1].b : 0.0;
      (after < 0.0 || before > 0.0 ? roots.stable : roots.unstable).push_back(nd[i].x);
      continue;
    }
    if (i + 1 == n || nd[i + 1].b == 0.0 || (nd[i].b > 0.0) == (nd[i + 1].b > 0.0)) continue;
    double lo = nd[i].x, hi = nd[i + 1].x;
    const bool positive_left = nd[i].b > 0.0;
    double root = 0.5 * (lo + hi);
    while (true) {
      root = 0.5 * (lo + hi);
      const double bm = b_at(root);
      if (std::abs(bm) < 1e-18 || hi - lo < 1e-12 || root <= lo || root >= hi) break;
      ((bm > 0.0) == positive_left ? lo : hi) = root;
    }
    (positive_left ? roots.stable : roots.unstable).push_back(root);
  }
  if (roots.stable.empty() && roots.unstable.empty()) {
    std::ostringstream os;
    os << "stationary_temperature: drift has no sign change on [" << nd.front().x << ", "
       << nd.back().x << "] K^2; extend the grid";
    throw NumericalError(os.str());
  }
  if (roots.stable.empty()) {
    throw NumericalError("stationary_temperature: drift has no stable root on the grid");
  }
  return roots;
}

double relaxation_time(double x_s, const PhysicalParams& params, const CorrectionOptions& opt,
                       double rel_step) {
  const double h = rel_step * x_s;
  const double slope = (fp_point(x_s + h, params, opt).b - fp_point(x_s - h, params, opt).b) / (2.0 * h);
  if (!(slope < 0.0)) throw NumericalError("relaxation_time: root is not stable");
  return -1.0 / slope;
}

double ts_closed_form(const PhysicalParams& p) {
  const double tp = p.phonon_temp;
  const double g2 = p.coupling_squared();
  const double k2 = p.drive_strength * p.drive_strength;
  const double denom = g2 * g2 + 8.0 * k2;
  const double power = denom > 0.0 ? p.level_spacing * p.omega() * g2 * 4.0 * k2 / denom : 0.0;
  return std::pow(tp * tp * tp * tp * tp + power / p.sigma_v, 0.2);
}

StationaryResult solve_stationary(const std::vector<double>& nodes, const PhysicalParams& params,
                                  const CorrectionOptions& opt) {
  StationaryResult r;
  r.coeffs = fp_coefficients(nodes, params, opt);
  r.density = stationary_distribution(r.coeffs);
  r.roots = stationary_temperature(r.coeffs, params, opt);
  r.x_s = r.roots.stable.front();
  r.t_s = std::sqrt(r.x_s);
  r.t_s_closed = ts_closed_form(params);
  return r;
}

}  // namespace qcal
