#include "qcal/stats.hpp"

#include <algorithm>
#include <cmath>

#include "qcal/errors.hpp"

namespace qcal {

double Histogram::integral() const {
  double s = 0.0;
  for (double d : density) s += d;
  return s * width;
}

double Histogram::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += center(k) * density[k];
  return s * width;
}

double Histogram::stddev() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += (center(k) - m) * (center(k) - m) * density[k];
  return std::sqrt(s * width);
}

namespace {

Histogram fill(const std::vector<double>& samples, double width, double origin, std::size_t bins) {
  Histogram h;
  h.origin = origin;
  h.width = width;
  h.density.assign(bins, 0.0);
  for (double s : samples) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor((s - origin) / width)));
    h.density[std::min(k, bins - 1)] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(samples.size()) * width);
  for (auto& d : h.density) d *= scale;
  return h;
}

void check_width(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("histogram: bin width must be > 0");
}

}  // namespace

Histogram histogram(const std::vector<double>& samples, double width) {
  check_width(width);
  if (samples.size() < 2) throw ConfigError("histogram: need at least 2 samples");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const auto bins = static_cast<std::size_t>(std::floor((*hi - *lo) / width)) + 1;
  return fill(samples, width, *lo, bins);
}

Histogram aligned_histogram(const std::vector<double>& samples, double width, double anchor) {
  check_width(width);
  if (samples.empty()) throw ConfigError("histogram: empty input");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double k_lo = std::floor((*lo - anchor) / width);
  const double k_hi = std::floor((*hi - anchor) / width);
  const double origin = anchor + k_lo * width;
  return fill(samples, width, origin, static_cast<std::size_t>(k_hi - k_lo) + 1);
}

Histogram temperature_histogram(const std::vector<XCell>& cells, double width, double anchor) {
  check_width(width);
  double t_lo = INFINITY, t_hi = -INFINITY;
  for (const auto& c : cells) {
    if (c.mass == 0.0) continue;
    t_lo = std::min(t_lo, std::sqrt(std::max(0.0, c.lo)));
    t_hi = std::max(t_hi, std::sqrt(std::max(0.0, c.hi)));
  }
  if (!(t_hi >= t_lo)) throw ConfigError("temperature_histogram: no mass");
  const double k_lo = std::floor((t_lo - anchor) / width);
  const double k_hi = std::floor((t_hi - anchor) / width);
  Histogram h;
  h.origin = anchor + k_lo * width;
  h.width = width;
  h.density.assign(static_cast<std::size_t>(k_hi - k_lo) + 1, 0.0);
  double total = 0.0;
  for (const auto& c : cells) {
    if (c.mass == 0.0 || !(c.hi > c.lo)) continue;
    const double per_x = c.mass / (c.hi - c.lo);
    const auto first = static_cast<std::size_t>(
        std::max(0.0, std::floor((std::sqrt(std::max(0.0, c.lo)) - h.origin) / width)));
    for (std::size_t k = first; k < h.size(); ++k) {
      const double b_lo = h.edge(k) * h.edge(k);
      const double b_hi = h.edge(k + 1) * h.edge(k + 1);
      if (b_lo >= c.hi) break;
      const double overlap = std::min(c.hi, b_hi) - std::max(c.lo, b_lo);
      if (overlap > 0.0) h.density[k] += per_x * overlap;
    }
    total += c.mass;
  }
  if (!(total > 0.0)) throw ConfigError("temperature_histogram: no mass");
  for (auto& d : h.density) d /= total * width;
  return h;
}

std::vector<XCell> uniform_cells(const std::vector<double>& x, const std::vector<double>& f) {
  std::vector<XCell> cells;
  if (x.size() < 2) return cells;
  const double dx = x[1] - x[0];
  cells.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = std::max(0.0, x[i] - 0.5 * dx);
    const double hi = x[i] + 0.5 * dx;
    cells.push_back({lo, hi, f[i] * dx});
  }
  return cells;
}

std::vector<XCell> trapezoid_cells(const std::vector<double>& x, const std::vector<double>& f) {
  std::vector<XCell> cells;
  const std::size_t n = x.size();
  if (n < 2) return cells;
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? x[0] : 0.5 * (x[i - 1] + x[i]);
    const double hi = i + 1 == n ? x[n - 1] : 0.5 * (x[i] + x[i + 1]);
    cells.push_back({lo, hi, f[i] * (hi - lo)});
  }
  return cells;
}

Distances distance_metrics(const Histogram& p, const Histogram& q) {
  if (std::abs(p.width - q.width) > 1e-9 * p.width) {
    throw ConfigError("distance_metrics: histograms have different bin widths");
  }
  const double shift = (q.origin - p.origin) / p.width;
  const double k = std::round(shift);
  if (std::abs(shift - k) > 1e-6) throw ConfigError("distance_metrics: bin edges are not aligned");
  const auto offset = static_cast<long>(k);  // q bin j sits at p bin j + offset
  const long lo = std::min(0L, offset);
  const long hi = std::max(static_cast<long>(p.size()), offset + static_cast<long>(q.size()));
  const double np = p.integral(), nq = q.integral();
  if (!(np > 0.0) || !(nq > 0.0)) throw ConfigError("distance_metrics: empty density");
  Distances d{0.0, 0.0};
  double cp = 0.0, cq = 0.0;
  for (long b = lo; b < hi; ++b) {
    const double pv = (b >= 0 && b < static_cast<long>(p.size())) ? p.density[static_cast<std::size_t>(b)] / np : 0.0;
    const long j = b - offset;
    const double qv = (j >= 0 && j < static_cast<long>(q.size())) ? q.density[static_cast<std::size_t>(j)] / nq : 0.0;
    d.l1 += std::abs(pv - qv) * p.width;
    cp += pv * p.width;
    cq += qv * p.width;
    d.ks = std::max(d.ks, std::abs(cp - cq));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_survival(lambda), 1.628 * std::sqrt((n + m) / (n * m))};
}

Moments moments(const std::vector<double>& s) {
  if (s.empty()) throw ConfigError("moments: empty sample");
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(s.size());
  const double sd = s.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd, sd / std::sqrt(n)};
}

}  // namespace qcal
