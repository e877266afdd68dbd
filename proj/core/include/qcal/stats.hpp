#pragma once

#include <cstddef>
#include <vector>

namespace qcal {

/// Piecewise-constant density on bins [origin + k w, origin + (k+1) w).
struct Histogram {
  double origin = 0.0;
  double width = 1.0;
  std::vector<double> density;

  std::size_t size() const { return density.size(); }
  double edge(std::size_t k) const { return origin + static_cast<double>(k) * width; }
  double center(std::size_t k) const { return edge(k) + 0.5 * width; }
  double integral() const;
  double mean() const;
  double stddev() const;
};

/// Normalized histogram with origin at the smallest sample. Raises ConfigError
/// for fewer than 2 samples or width <= 0.
Histogram histogram(const std::vector<double>& samples, double width);

/// Normalized histogram whose bin edges lie on anchor + k w for integer k.
/// Empty input or width <= 0 raises ConfigError.
Histogram aligned_histogram(const std::vector<double>& samples, double width, double anchor);

/// Probability mass spread uniformly over [lo, hi) in X = T^2.
struct XCell {
  double lo;
  double hi;
  double mass;
};

/// Maps X cells onto temperature bins of width `width` anchored at `anchor`:
/// each cell's mass goes to bins in proportion to the X overlap with
/// [T_lo^2, T_hi^2). Result is normalized.
Histogram temperature_histogram(const std::vector<XCell>& cells, double width, double anchor);

/// Cells for node values f_i on a uniform grid: [x_i - dx/2, x_i + dx/2),
/// mass f_i dx. Cells below X = 0 are clipped.
std::vector<XCell> uniform_cells(const std::vector<double>& x, const std::vector<double>& f);
/// Cells bounded by node midpoints, mass f_i times the trapezoid weight.
std::vector<XCell> trapezoid_cells(const std::vector<double>& x, const std::vector<double>& f);

struct Distances {
  double l1;  ///< sum |p - q| w, in [0, 2]
  double ks;  ///< max |CDF_p - CDF_q|, in [0, 1]
};

/// Distances between histograms of equal width whose edges coincide (origins
/// differ by an integer number of bins); supports are padded with zeros.
/// Both are renormalized first. Incompatible binning raises ConfigError.
Distances distance_metrics(const Histogram& p, const Histogram& q);

struct KSResult {
  double statistic;
  double p_value;       ///< asymptotic Kolmogorov distribution
  double critical_1pct; ///< 1.628 sqrt((n + m) / (n m))
};

KSResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

struct Moments {
  double mean;
  double stddev;  ///< unbiased
  double sem;     ///< stddev / sqrt(n)
};

Moments moments(const std::vector<double>& samples);

}  // namespace qcal
