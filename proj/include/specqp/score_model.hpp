#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace specqp {

class TripleStore;
struct TriplePattern;

// Score summary of one pattern (or of a join, after rebucketing): `m`
// answers whose score mass splits at `sigma_r`. The lower bucket [0, sigma_r)
// carries probability (S_m - S_r) / S_m, the upper bucket [sigma_r, U] the
// remaining S_r / S_m, each spread uniformly.
struct TwoBucketHistogram {
  std::int64_t m = 0;
  double sigma_r = 0.0;
  double S_r = 0.0;
  double S_m = 0.0;
  double U = 1.0;

  double low_mass() const { return (S_m - S_r) / S_m; }
  double high_mass() const { return S_r / S_m; }
  double low_density() const { return low_mass() / sigma_r; }
  double high_density() const { return high_mass() / (U - sigma_r); }
  double mean() const;
};

// Fraction of the total score mass that defines the upper bucket.
inline constexpr double kTopBucketMass = 0.8;

// Density that is linear on each interval [breakpoints[j], breakpoints[j+1]]:
// f(x) = segments[j].intercept + segments[j].slope * (x - breakpoints[j]).
// Jumps are allowed at breakpoints. The constructor rescales to unit mass.
class PiecewisePdf {
 public:
  struct Segment {
    double slope = 0.0;
    double intercept = 0.0;

    double at(double offset) const { return intercept + slope * offset; }
  };

  PiecewisePdf(std::vector<double> breakpoints, std::vector<Segment> segments);
  // Continuous density through (xs[i], values[i]).
  static PiecewisePdf from_knots(std::vector<double> xs, std::vector<double> values);

  double upper() const { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool piecewise_constant() const;

  // Value at x; at a jump the right-hand segment wins, except at U.
  double pdf(double x) const;
  double cdf(double x) const;
  // Smallest x with cdf(x) >= p; 0 for p = 0 and upper() for p = 1.
  double inverse_cdf(double p) const;
  double mean() const;
  // Integral of t * f(t) over [x, U].
  double tail_moment(double x) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  std::vector<double> cumulative_;  // cdf at each breakpoint
  std::vector<double> suffix_moment_;  // tail moment from each breakpoint
};

// Upper-bucket boundary from the sorted scores: the smallest rank r whose
// cumulative score reaches 80% of the total. Throws NoStats for an empty
// list and DegenerateHistogram when all scores are zero.
TwoBucketHistogram build_histogram(std::span<const double> scores, double upper = 1.0);
TwoBucketHistogram build_histogram(const TripleStore& store, const TriplePattern& pattern);

// Keeps sigma_r inside [eps, U - eps] with eps = 1e-6 * U.
double clamp_boundary(double sigma_r, double upper);

double pdf_eval(const TwoBucketHistogram& h, double x);
double cdf_eval(const TwoBucketHistogram& h, double x);
double inverse_cdf(const TwoBucketHistogram& h, double p);
double inverse_cdf(const PiecewisePdf& f, double p);

PiecewisePdf to_pdf(const TwoBucketHistogram& h);

// Density of X1 + X2. Two histograms convolve exactly to a piecewise-linear
// density. A piecewise-linear f1 gives piecewise-quadratic pieces, which are
// sampled adaptively and re-fit linearly to within kConvolutionTolerance;
// the fit is then adjusted so its mass and mean are exact.
PiecewisePdf convolve(const TwoBucketHistogram& f1, const TwoBucketHistogram& f2);
PiecewisePdf convolve(const PiecewisePdf& f1, const TwoBucketHistogram& f2);

inline constexpr double kConvolutionTolerance = 1e-7;

// Two-bucket summary of a join distribution for `count` answers. sigma_r is
// the point above which 80% of the score mass (integral of t f(t)) lies.
TwoBucketHistogram rebucket(const PiecewisePdf& f, std::int64_t count);

// Left-deep fold m <- round(m * m' * phi), half up, floored at 0.
// selectivities.size() must be counts.size() - 1.
std::int64_t estimate_join_count(std::span<const std::int64_t> counts, std::span<const double> selectivities);

// Expected score of the answer at `rank` (1 = best) among h.m draws,
// approximated by the inverse cdf at (m + 1 - rank) / (m + 1). Throws
// RankOutOfRange unless 1 <= rank <= h.m.
double expected_score_at_rank(const TwoBucketHistogram& h, std::int64_t rank);

// Distribution of w * X. Throws DegenerateHistogram for w = 0.
TwoBucketHistogram scale_histogram(const TwoBucketHistogram& h, double w);

}  // namespace specqp
