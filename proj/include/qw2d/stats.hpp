#pragma once
#include <functional>
#include <string>
#include <vector>

namespace qw {

struct LineFit {
  double slope = 0, intercept = 0;
  double slope_se = 0, intercept_se = 0;
  double r2 = 0;
  int n = 0;
};

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct QuadFit {
  double c0 = 0, c1 = 0, c2 = 0;  // y = c0 + c1 x + c2 x^2
  double c2_se = 0;
  int n = 0;
};

QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y);

// One-sample Kolmogorov-Smirnov distance against a CDF; sorts a copy.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical KS distance at significance level 1% (asymptotic).
double ks_critical_1pct(size_t n);
double ks_two_sample_critical_1pct(size_t n, size_t m);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

struct Histogram {
  double lo = 0, hi = 1;
  std::vector<std::uint64_t> counts;
  std::uint64_t under = 0, over = 0;

  Histogram(double a, double b, int bins) : lo(a), hi(b), counts(bins, 0) {}
  void add(double v);
  void write_csv(const std::string& path) const;  // bin_lo,bin_hi,count
};

}  // namespace qw
