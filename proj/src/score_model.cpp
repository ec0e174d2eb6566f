#include "specqp/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "specqp/errors.hpp"
#include "specqp/store.hpp"

namespace specqp {

double TwoBucketHistogram::mean() const {
  return low_mass() * sigma_r / 2.0 + high_mass() * (sigma_r + U) / 2.0;
}

namespace {

// Integral of (origin + t) * (c + s t) dt over [t0, t1].
double segment_moment(double origin, const PiecewisePdf::Segment& seg, double t0, double t1) {
  auto prim = [&](double t) {
    return origin * seg.intercept * t + (origin * seg.slope + seg.intercept) * t * t / 2.0 +
           seg.slope * t * t * t / 3.0;
  };
  return prim(t1) - prim(t0);
}

double segment_mass(const PiecewisePdf::Segment& seg, double t) {
  return seg.intercept * t + seg.slope * t * t / 2.0;
}

}  // namespace

PiecewisePdf::PiecewisePdf(std::vector<double> breakpoints, std::vector<Segment> segments) {
  if (breakpoints.size() < 2 || segments.size() + 1 != breakpoints.size()) {
    throw DomainError("piecewise pdf needs n + 1 breakpoints for n segments");
  }
  if (breakpoints.front() != 0.0) throw DomainError("piecewise pdf support must start at 0");
  double mass = 0.0;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    double len = breakpoints[j + 1] - breakpoints[j];
    if (!(len >= 0.0)) throw DomainError("piecewise pdf breakpoints must ascend");
    if (len == 0.0) continue;
    double left = segments[j].at(0.0);
    double right = segments[j].at(len);
    // A knot value of 0 can come back as -1e-17 through slope * len.
    const double slack = 1e-12 * (std::abs(left) + std::abs(right));
    if (left < -slack || right < -slack) throw DomainError("piecewise pdf must be non-negative");
    breakpoints_.push_back(breakpoints[j]);
    segments_.push_back(segments[j]);
    mass += segment_mass(segments[j], len);
  }
  if (segments_.empty()) throw DomainError("piecewise pdf has an empty support");
  breakpoints_.push_back(breakpoints.back());
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("piecewise pdf has no mass");
  for (Segment& seg : segments_) {
    seg.slope /= mass;
    seg.intercept /= mass;
  }
  cumulative_.assign(breakpoints_.size(), 0.0);
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    cumulative_[j + 1] = cumulative_[j] + segment_mass(segments_[j], breakpoints_[j + 1] - breakpoints_[j]);
  }
  suffix_moment_.assign(breakpoints_.size(), 0.0);
  for (std::size_t j = segments_.size(); j-- > 0;) {
    suffix_moment_[j] = suffix_moment_[j + 1] +
                        segment_moment(breakpoints_[j], segments_[j], 0.0, breakpoints_[j + 1] - breakpoints_[j]);
  }
}

PiecewisePdf PiecewisePdf::from_knots(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() != values.size() || xs.size() < 2) throw DomainError("from_knots needs matching knot lists");
  std::vector<Segment> segs;
  segs.reserve(xs.size() - 1);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double len = xs[i + 1] - xs[i];
    double slope = len > 0 ? (values[i + 1] - values[i]) / len : 0.0;
    segs.push_back(Segment{slope, values[i]});
  }
  return PiecewisePdf(std::move(xs), std::move(segs));
}

bool PiecewisePdf::piecewise_constant() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.slope == 0.0; });
}

double PiecewisePdf::pdf(double x) const {
  if (x < 0.0 || x > upper()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin());
  j = j == 0 ? 0 : std::min(j - 1, segments_.size() - 1);
  return std::max(0.0, segments_[j].at(x - breakpoints_[j]));
}

double PiecewisePdf::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= upper()) return 1.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  double v = cumulative_[j] + segment_mass(segments_[j], x - breakpoints_[j]);
  return std::clamp(v, 0.0, 1.0);
}

double PiecewisePdf::inverse_cdf(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0 || p >= cumulative_.back()) return upper();
  auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), p);
  std::size_t j = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const Segment& seg = segments_[j];
  double len = breakpoints_[j + 1] - breakpoints_[j];
  double d = p - cumulative_[j];
  double a = seg.slope / 2.0;
  double b = seg.intercept;
  double disc = std::max(0.0, b * b + 4.0 * a * d);
  double denom = b + std::sqrt(disc);
  double t = denom > 0.0 ? 2.0 * d / denom : len;
  return breakpoints_[j] + std::clamp(t, 0.0, len);
}

double PiecewisePdf::mean() const { return suffix_moment_.front(); }

double PiecewisePdf::tail_moment(double x) const {
  if (x <= 0.0) return suffix_moment_.front();
  if (x >= upper()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  double len = breakpoints_[j + 1] - breakpoints_[j];
  return suffix_moment_[j + 1] + segment_moment(breakpoints_[j], segments_[j], x - breakpoints_[j], len);
}

double clamp_boundary(double sigma_r, double upper) {
  const double eps = 1e-6 * upper;
  return std::max(eps, std::min(upper - eps, sigma_r));
}

TwoBucketHistogram build_histogram(std::span<const double> scores, double upper) {
  if (scores.empty()) throw NoStats("no matches to summarize");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  long double total = 0.0L;
  for (double s : sorted) total += s;
  if (!(total > 0.0L)) throw DegenerateHistogram("all scores are zero");
  const long double threshold = static_cast<long double>(kTopBucketMass) * total * (1.0L - 1e-12L);
  long double cumulative = 0.0L;
  std::size_t r = 0;
  for (; r < sorted.size(); ++r) {
    cumulative += sorted[r];
    if (cumulative >= threshold) break;
  }
  r = std::min(r, sorted.size() - 1);
  TwoBucketHistogram h;
  h.m = static_cast<std::int64_t>(sorted.size());
  h.U = upper;
  h.sigma_r = clamp_boundary(sorted[r], upper);
  h.S_r = static_cast<double>(cumulative);
  h.S_m = static_cast<double>(total);
  return h;
}

TwoBucketHistogram build_histogram(const TripleStore& store, const TriplePattern& pattern) {
  std::vector<double> scores;
  PatternScan scan = store.scan_sorted(pattern);
  while (auto m = scan.next()) scores.push_back(m->norm_score);
  return build_histogram(scores, 1.0);
}

namespace {

void check_domain(const TwoBucketHistogram& h, double x) {
  if (!(x >= 0.0 && x <= h.U)) {
    throw DomainError("score " + format_score(x) + " outside [0, " + format_score(h.U) + "]");
  }
}

}  // namespace

double pdf_eval(const TwoBucketHistogram& h, double x) {
  check_domain(h, x);
  return x < h.sigma_r ? h.low_density() : h.high_density();
}

double cdf_eval(const TwoBucketHistogram& h, double x) {
  check_domain(h, x);
  if (x < h.sigma_r) return h.low_density() * x;
  return std::min(1.0, h.low_mass() + h.high_mass() * (x - h.sigma_r) / (h.U - h.sigma_r));
}

double inverse_cdf(const TwoBucketHistogram& h, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability " + format_score(p) + " outside [0, 1]");
  if (p == 0.0) return 0.0;
  const double low = h.low_mass();
  if (p <= low) return p * h.sigma_r / low;
  return std::min(h.U, h.sigma_r + (p - low) * (h.U - h.sigma_r) / h.high_mass());
}

double inverse_cdf(const PiecewisePdf& f, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability " + format_score(p) + " outside [0, 1]");
  return f.inverse_cdf(p);
}

PiecewisePdf to_pdf(const TwoBucketHistogram& h) {
  return PiecewisePdf({0.0, h.sigma_r, h.U},
                      {PiecewisePdf::Segment{0.0, h.low_density()}, PiecewisePdf::Segment{0.0, h.high_density()}});
}

namespace {

struct Box {
  double lo, hi, density;
};

// Rescales knot values by (alpha + beta x) so the piecewise-linear density
// has unit mass and the requested mean. Leaves values alone if that would
// make any knot negative.
void match_moments(const std::vector<double>& xs, std::vector<double>& v, double target_mean) {
  auto moments = [&](auto weight) {
    double mass = 0.0, first = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      double len = xs[i + 1] - xs[i];
      double a = v[i] * weight(xs[i]);
      double b = v[i + 1] * weight(xs[i + 1]);
      mass += len * (a + b) / 2.0;
      first += len * (a * (2.0 * xs[i] + xs[i + 1]) + b * (xs[i] + 2.0 * xs[i + 1])) / 6.0;
    }
    return std::pair{mass, first};
  };
  auto [a0, b0] = moments([](double) { return 1.0; });
  auto [a1, b1] = moments([](double x) { return x; });
  double det = a0 * b1 - a1 * b0;
  if (!(std::abs(det) > 1e-300)) return;
  double alpha = (b1 - a1 * target_mean) / det;
  double beta = (a0 * target_mean - b0) / det;
  for (double x : xs) {
    if (alpha + beta * x < 0.0) return;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] *= alpha + beta * xs[i];
}

PiecewisePdf convolve_with_boxes(const PiecewisePdf& f1, double mean1, const std::vector<Box>& boxes, double mean2) {
  const double upper = f1.upper() + boxes.back().hi;
  std::vector<double> cuts;
  cuts.reserve(f1.breakpoints().size() * (boxes.size() + 1));
  for (double x : f1.breakpoints()) {
    cuts.push_back(x + boxes.front().lo);
    for (const Box& b : boxes) cuts.push_back(x + b.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  const double merge_eps = 1e-14 * upper;
  std::vector<double> knots;
  for (double c : cuts) {
    c = std::clamp(c, 0.0, upper);
    if (knots.empty() || c - knots.back() > merge_eps) knots.push_back(c);
  }
  knots.front() = 0.0;
  knots.back() = upper;

  auto eval = [&](double x) {
    double v = 0.0;
    for (const Box& b : boxes) v += b.density * (f1.cdf(x - b.lo) - f1.cdf(x - b.hi));
    return std::max(0.0, v);
  };

  std::vector<double> xs;
  std::vector<double> values;
  xs.reserve(knots.size());
  values.reserve(knots.size());
  const bool exact = f1.piecewise_constant();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    const double len = hi - lo;
    const double v_lo = eval(lo);
    xs.push_back(lo);
    values.push_back(v_lo);
    if (exact) continue;
    // Each piece is quadratic; its second difference gives the leading
    // coefficient and with it the step that keeps linear interpolation
    // within tolerance.
    const double v_mid = eval(lo + len / 2.0);
    const double v_hi = eval(hi);
    const double lead = 2.0 * (v_lo - 2.0 * v_mid + v_hi) / (len * len);
    double steps = std::ceil(len * std::sqrt(std::abs(lead) / (4.0 * kConvolutionTolerance)));
    const std::size_t n = static_cast<std::size_t>(std::clamp(steps, 1.0, 16384.0));
    for (std::size_t s = 1; s < n; ++s) {
      double x = lo + len * static_cast<double>(s) / static_cast<double>(n);
      xs.push_back(x);
      values.push_back(eval(x));
    }
  }
  xs.push_back(upper);
  values.push_back(eval(upper));
  match_moments(xs, values, mean1 + mean2);
  return PiecewisePdf::from_knots(std::move(xs), std::move(values));
}

std::vector<Box> boxes_of(const TwoBucketHistogram& h) {
  return {Box{0.0, h.sigma_r, h.low_density()}, Box{h.sigma_r, h.U, h.high_density()}};
}

}  // namespace

PiecewisePdf convolve(const TwoBucketHistogram& f1, const TwoBucketHistogram& f2) {
  return convolve_with_boxes(to_pdf(f1), f1.mean(), boxes_of(f2), f2.mean());
}

PiecewisePdf convolve(const PiecewisePdf& f1, const TwoBucketHistogram& f2) {
  return convolve_with_boxes(f1, f1.mean(), boxes_of(f2), f2.mean());
}

TwoBucketHistogram rebucket(const PiecewisePdf& f, std::int64_t count) {
  if (count < 1) throw ArgumentError("rebucket needs a count of at least 1");
  const double mu = f.mean();
  if (!(mu > 0.0)) throw DegenerateHistogram("distribution has zero mean");
  const double target = kTopBucketMass * mu;
  double lo = 0.0;
  double hi = f.upper();
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * f.upper(); ++iter) {
    double mid = (lo + hi) / 2.0;
    if (f.tail_moment(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  TwoBucketHistogram h;
  h.m = count;
  h.U = f.upper();
  h.sigma_r = clamp_boundary((lo + hi) / 2.0, h.U);
  h.S_m = static_cast<double>(count) * mu;
  h.S_r = kTopBucketMass * h.S_m;
  return h;
}

std::int64_t estimate_join_count(std::span<const std::int64_t> counts, std::span<const double> selectivities) {
  if (counts.empty()) return 0;
  if (selectivities.size() + 1 != counts.size()) {
    throw ArgumentError("need one selectivity per join: " + std::to_string(counts.size()) + " counts, " +
                        std::to_string(selectivities.size()) + " selectivities");
  }
  long double m = static_cast<long double>(counts[0]);
  for (std::size_t j = 0; j < selectivities.size(); ++j) {
    m = std::floor(m * static_cast<long double>(counts[j + 1]) * static_cast<long double>(selectivities[j]) + 0.5L);
    m = std::max(0.0L, m);
  }
  return static_cast<std::int64_t>(std::max(0.0L, m));
}

double expected_score_at_rank(const TwoBucketHistogram& h, std::int64_t rank) {
  if (rank < 1 || rank > h.m) {
    throw RankOutOfRange("rank " + std::to_string(rank) + " outside 1.." + std::to_string(h.m));
  }
  const double n = static_cast<double>(h.m);
  return inverse_cdf(h, (n + 1.0 - static_cast<double>(rank)) / (n + 1.0));
}

TwoBucketHistogram scale_histogram(const TwoBucketHistogram& h, double w) {
  if (!(w > 0.0)) throw DegenerateHistogram("scaling by a non-positive weight");
  if (w > 1.0) throw ArgumentError("scale weight above 1");
  TwoBucketHistogram out = h;
  out.sigma_r *= w;
  out.U *= w;
  out.S_r *= w;
  out.S_m *= w;
  return out;
}

}  // namespace specqp
