#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "queuechan/rng.hpp"

namespace queuechan {

/// Finite-support probability mass function over non-negative integers.
/// Mass at offset+k is masses()[k]. A nonzero tail_bound records probability
/// mass deliberately dropped when truncating an infinite-support family;
/// masses are never renormalized after truncation, so downstream error
/// bounds can account for the missing mass explicitly.
///
/// Canonical form: first and last mass entries are nonzero (offset is the
/// smallest support point), every mass >= 0, and sum + tail_bound == 1 up
/// to numerical slack.
class Pmf {
public:
  Pmf(std::int64_t offset, std::vector<double> masses, double tail_bound = 0.0);

  std::int64_t offset() const { return offset_; }
  const std::vector<double>& masses() const { return masses_; }
  double tail_bound() const { return tail_bound_; }

  std::int64_t min_support() const { return offset_; }
  std::int64_t max_support() const {
    return offset_ + static_cast<std::int64_t>(masses_.size()) - 1;
  }
  std::size_t size() const { return masses_.size(); }

  /// Mass at t; zero outside the stored window.
  double at(std::int64_t t) const {
    std::int64_t k = t - offset_;
    if (k < 0 || k >= static_cast<std::int64_t>(masses_.size())) return 0.0;
    return masses_[static_cast<std::size_t>(k)];
  }

  double sum() const;            // compensated sum of stored masses
  double mean() const;           // of the stored part only
  double second_moment() const;  // of the stored part only

  /// Point mass at t.
  static Pmf delta(std::int64_t t) { return Pmf(t, {1.0}); }

private:
  std::int64_t offset_ = 0;
  std::vector<double> masses_;
  double tail_bound_ = 0.0;
};

/// Exact discrete convolution; offsets add, tail bounds add.
Pmf convolve(const Pmf& a, const Pmf& b);

/// Total variation distance, 0.5 * L1 over the union support. Unstored tail
/// bounds count as fully mismatched mass.
double tv_distance(const Pmf& a, const Pmf& b);

// ---------------------------------------------------------------------------
// Parametric families
// ---------------------------------------------------------------------------

/// Point mass at a positive integer.
struct Deterministic {
  std::int64_t value;
};

/// Support {1,2,...}, mass (1-r)^(t-1) * r, mean 1/r.
struct Geometric {
  double rate;
};

/// Mass 1-epsilon at 1 and epsilon at n >= 2. The bursty extremal family.
struct TwoPoint {
  double epsilon;
  std::int64_t n;
};

/// Sum of independent geometrics (stage rates r_i); support {I, I+1, ...}.
struct SumOfGeometric {
  std::vector<double> rates;
};

/// Geometric with rate r_i chosen with probability c_i.
struct MixtureOfGeometric {
  std::vector<double> weights;
  std::vector<double> rates;
};

/// Arbitrary finite-support pmf.
struct Explicit {
  Pmf pmf;
};

class ParametricDist {
public:
  using Variant = std::variant<Deterministic, Geometric, TwoPoint, SumOfGeometric,
                               MixtureOfGeometric, Explicit>;

  ParametricDist(Deterministic d);       // NOLINT(google-explicit-constructor)
  ParametricDist(Geometric g);           // NOLINT
  ParametricDist(TwoPoint t);            // NOLINT
  ParametricDist(SumOfGeometric s);      // NOLINT
  ParametricDist(MixtureOfGeometric m);  // NOLINT
  ParametricDist(Explicit e);            // NOLINT

  const Variant& value() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }
  /// "deterministic", "geometric", ... (the serialized kind tag).
  std::string kind() const;

private:
  Variant v_;
};

struct MomentSummary {
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Exact closed-form moments per family; Explicit sums directly over the
/// stored support (its truncation tail is ignored here).
MomentSummary moments(const ParametricDist& dist);

/// Rate conventions: inter-arrival / service distributions carry rate
/// 1/mean, per-slot batch distributions carry rate = mean.
double rate_from_interarrival(const ParametricDist& dist);
double rate_from_service(const ParametricDist& dist);
double rate_from_batch(const ParametricDist& dist);

/// Smallest support point (exact per family).
std::int64_t min_support(const ParametricDist& dist);

/// Probability mass at a single point, exact per family.
double mass_at(const ParametricDist& dist, std::int64_t t);

/// Finite truncation with certified omitted-tail mass <= tail_eps.
/// Exact finite families come back with tail bound 0. Masses are not
/// renormalized.
Pmf materialize(const ParametricDist& dist, double tail_eps);

/// E[alpha^T] for alpha in (0,1). Closed form for every parametric family;
/// Explicit sums its stored support.
double gf_eval(const ParametricDist& dist, double alpha);

/// Draws one variate. Exact (inversion / composition), no truncation.
class DistSampler {
public:
  explicit DistSampler(ParametricDist dist);
  std::int64_t sample(RngStream& rng) const;

private:
  ParametricDist dist_;
  std::vector<double> cdf_;  // Explicit and mixture-weight lookup
};

}  // namespace queuechan
