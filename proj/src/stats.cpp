#include "qw2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace qw {

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size())
    throw std::runtime_error("linear_fit: need at least 2 matching points");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::runtime_error("linear_fit: degenerate x values");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  const double s2 = n > 2 ? ssr / (n - 2) : 0.0;
  f.slope_se = std::sqrt(s2 / sxx);
  f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 3 || y.size() != x.size())
    throw std::runtime_error("quadratic_fit: need at least 3 matching points");
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    a(i, 2) = x[i] * x[i];
    b(i) = y[i];
  }
  const Eigen::Matrix3d ata = a.transpose() * a;
  const Eigen::Vector3d c = ata.ldlt().solve(a.transpose() * b);
  QuadFit q;
  q.n = n;
  q.c0 = c(0);
  q.c1 = c(1);
  q.c2 = c(2);
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    const double r = b(i) - (q.c0 + q.c1 * x[i] + q.c2 * x[i] * x[i]);
    ssr += r * r;
  }
  const double s2 = n > 3 ? ssr / (n - 3) : 0.0;
  q.c2_se = std::sqrt(s2 * ata.inverse()(2, 2));
  return q;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::runtime_error("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(i / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::runtime_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical_1pct(size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical_1pct(size_t n, size_t m) {
  return 1.6276 * std::sqrt(static_cast<double>(n + m) /
                            (static_cast<double>(n) * m));
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

void Histogram::add(double v) {
  if (v < lo) { ++under; return; }
  if (v >= hi) { ++over; return; }
  const int bins = static_cast<int>(counts.size());
  int k = static_cast<int>((v - lo) / (hi - lo) * bins);
  if (k >= bins) k = bins - 1;
  ++counts[k];
}

void Histogram::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "bin_lo,bin_hi,count\n";
  const int bins = static_cast<int>(counts.size());
  const double w = (hi - lo) / bins;
  char buf[64];
  for (int k = 0; k < bins; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", lo + k * w, lo + (k + 1) * w);
    f << buf << counts[k] << '\n';
  }
}

}  // namespace qw
