#include "queuechan/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "queuechan/errors.hpp"
#include "queuechan/numeric.hpp"

namespace queuechan {

namespace {

void check_rate(double r, const char* what) {
  if (!(r > 0.0) || !(r < 1.0))
    throw DomainError(std::string(what) + " rate must lie in (0,1), got " + std::to_string(r));
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0) || !(p <= 1.0))
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
}

}  // namespace

Pmf::Pmf(std::int64_t offset, std::vector<double> masses, double tail_bound)
    : offset_(offset), masses_(std::move(masses)), tail_bound_(tail_bound) {
  if (offset_ < 0) throw DomainError("pmf offset must be non-negative");
  if (masses_.empty()) throw DomainError("pmf must have at least one mass");
  if (!(tail_bound_ >= 0.0) || tail_bound_ > 1.0)
    throw DomainError("pmf tail bound must lie in [0,1]");
  for (double& m : masses_) {
    if (std::isnan(m) || m < -1e-12 || m > 1.0 + 1e-12)
      throw DomainError("pmf mass out of range: " + std::to_string(m));
    m = std::clamp(m, 0.0, 1.0);
  }
  // canonical form: trim zero ends, keep offset = smallest support point
  std::size_t lead = 0;
  while (lead + 1 < masses_.size() && masses_[lead] == 0.0) ++lead;
  std::size_t trail = masses_.size();
  while (trail > lead + 1 && masses_[trail - 1] == 0.0) --trail;
  if (lead > 0 || trail < masses_.size()) {
    masses_ = std::vector<double>(masses_.begin() + static_cast<std::ptrdiff_t>(lead),
                                  masses_.begin() + static_cast<std::ptrdiff_t>(trail));
    offset_ += static_cast<std::int64_t>(lead);
  }
  double total = sum() + tail_bound_;
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("pmf masses + tail must sum to 1, got " + std::to_string(total));
}

double Pmf::sum() const { return compensated_sum(masses_); }

double Pmf::mean() const {
  KahanSum acc;
  for (std::size_t k = 0; k < masses_.size(); ++k)
    acc.add(static_cast<double>(offset_ + static_cast<std::int64_t>(k)) * masses_[k]);
  return acc.value();
}

double Pmf::second_moment() const {
  KahanSum acc;
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    double t = static_cast<double>(offset_ + static_cast<std::int64_t>(k));
    acc.add(t * t * masses_[k]);
  }
  return acc.value();
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double ai = a.masses()[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b.masses()[j];
  }
  // stored mass is (1-t_a)(1-t_b), so the missing mass is exactly
  // t_a + t_b - t_a t_b
  double tail = a.tail_bound() + b.tail_bound() - a.tail_bound() * b.tail_bound();
  return Pmf(a.offset() + b.offset(), std::move(out), tail);
}

double tv_distance(const Pmf& a, const Pmf& b) {
  std::int64_t lo = std::min(a.min_support(), b.min_support());
  std::int64_t hi = std::max(a.max_support(), b.max_support());
  KahanSum acc;
  for (std::int64_t t = lo; t <= hi; ++t) acc.add(std::abs(a.at(t) - b.at(t)));
  return 0.5 * (acc.value() + a.tail_bound() + b.tail_bound());
}

// ---------------------------------------------------------------------------

ParametricDist::ParametricDist(Deterministic d) : v_(d) {
  if (d.value < 1) throw DomainError("deterministic value must be a positive integer");
}
ParametricDist::ParametricDist(Geometric g) : v_(g) { check_rate(g.rate, "geometric"); }
ParametricDist::ParametricDist(TwoPoint t) : v_(t) {
  if (!(t.epsilon > 0.0) || !(t.epsilon < 1.0))
    throw DomainError("two-point epsilon must lie in (0,1)");
  if (t.n < 2) throw DomainError("two-point upper support must be >= 2");
}
ParametricDist::ParametricDist(SumOfGeometric s) : v_(std::move(s)) {
  const auto& v = std::get<SumOfGeometric>(v_);
  if (v.rates.empty()) throw DomainError("sum-of-geometric needs at least one stage");
  for (double r : v.rates) check_rate(r, "sum-of-geometric stage");
}
ParametricDist::ParametricDist(MixtureOfGeometric m) : v_(std::move(m)) {
  const auto& v = std::get<MixtureOfGeometric>(v_);
  if (v.rates.empty() || v.weights.size() != v.rates.size())
    throw DomainError("mixture-of-geometric needs matching weights and rates");
  KahanSum wsum;
  for (double w : v.weights) {
    check_prob(w, "mixture weight");
    wsum.add(w);
  }
  if (std::abs(wsum.value() - 1.0) > 1e-12)
    throw DomainError("mixture weights must sum to 1");
  for (double r : v.rates) check_rate(r, "mixture component");
}
ParametricDist::ParametricDist(Explicit e) : v_(std::move(e)) {}

std::string ParametricDist::kind() const {
  struct V {
    std::string operator()(const Deterministic&) { return "deterministic"; }
    std::string operator()(const Geometric&) { return "geometric"; }
    std::string operator()(const TwoPoint&) { return "two_point"; }
    std::string operator()(const SumOfGeometric&) { return "sum_of_geometric"; }
    std::string operator()(const MixtureOfGeometric&) { return "mixture_of_geometric"; }
    std::string operator()(const Explicit&) { return "explicit"; }
  };
  return std::visit(V{}, v_);
}

MomentSummary moments(const ParametricDist& dist) {
  struct V {
    MomentSummary operator()(const Deterministic& d) const {
      double v = static_cast<double>(d.value);
      return {v, v * v};
    }
    MomentSummary operator()(const Geometric& g) const {
      // mean 1/r, E[T^2] = (2-r)/r^2
      return {1.0 / g.rate, (2.0 - g.rate) / (g.rate * g.rate)};
    }
    MomentSummary operator()(const TwoPoint& t) const {
      double n = static_cast<double>(t.n);
      return {(1.0 - t.epsilon) + t.epsilon * n, (1.0 - t.epsilon) + t.epsilon * n * n};
    }
    MomentSummary operator()(const SumOfGeometric& s) const {
      KahanSum mean, var;
      for (double r : s.rates) {
        mean.add(1.0 / r);
        var.add((1.0 - r) / (r * r));
      }
      double m = mean.value();
      return {m, var.value() + m * m};
    }
    MomentSummary operator()(const MixtureOfGeometric& m) const {
      KahanSum mean, m2;
      for (std::size_t i = 0; i < m.rates.size(); ++i) {
        double r = m.rates[i];
        mean.add(m.weights[i] / r);
        m2.add(m.weights[i] * (2.0 - r) / (r * r));
      }
      return {mean.value(), m2.value()};
    }
    MomentSummary operator()(const Explicit& e) const {
      return {e.pmf.mean(), e.pmf.second_moment()};
    }
  };
  return std::visit(V{}, dist.value());
}

double rate_from_interarrival(const ParametricDist& dist) {
  if (min_support(dist) < 1)
    throw DomainError("inter-arrival distribution must have support in {1,2,...}");
  return 1.0 / moments(dist).mean;
}

double rate_from_service(const ParametricDist& dist) {
  if (min_support(dist) < 1)
    throw DomainError("service distribution must have support in {1,2,...}");
  return 1.0 / moments(dist).mean;
}

double rate_from_batch(const ParametricDist& dist) { return moments(dist).mean; }

std::int64_t min_support(const ParametricDist& dist) {
  struct V {
    std::int64_t operator()(const Deterministic& d) const { return d.value; }
    std::int64_t operator()(const Geometric&) const { return 1; }
    std::int64_t operator()(const TwoPoint&) const { return 1; }
    std::int64_t operator()(const SumOfGeometric& s) const {
      return static_cast<std::int64_t>(s.rates.size());
    }
    std::int64_t operator()(const MixtureOfGeometric&) const { return 1; }
    std::int64_t operator()(const Explicit& e) const { return e.pmf.min_support(); }
  };
  return std::visit(V{}, dist.value());
}

double mass_at(const ParametricDist& dist, std::int64_t t) {
  struct V {
    std::int64_t t;
    double operator()(const Deterministic& d) const { return t == d.value ? 1.0 : 0.0; }
    double operator()(const Geometric& g) const {
      if (t < 1) return 0.0;
      return std::pow(1.0 - g.rate, static_cast<double>(t - 1)) * g.rate;
    }
    double operator()(const TwoPoint& tp) const {
      if (t == 1) return 1.0 - tp.epsilon;
      if (t == tp.n) return tp.epsilon;
      return 0.0;
    }
    double operator()(const SumOfGeometric& s) const {
      // convolve stage by stage up to t (exact; only used for small t)
      if (t < static_cast<std::int64_t>(s.rates.size())) return 0.0;
      std::vector<double> acc = {1.0};  // value offset builds up in `base`
      std::int64_t base = 0;
      for (double r : s.rates) {
        std::vector<double> next(static_cast<std::size_t>(t - base), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
          if (acc[i] == 0.0) continue;
          for (std::size_t j = 0; i + j < next.size(); ++j)
            next[i + j] += acc[i] * std::pow(1.0 - r, static_cast<double>(j)) * r;
        }
        acc = std::move(next);
        base += 1;
        if (acc.empty()) return 0.0;
      }
      std::size_t k = static_cast<std::size_t>(t - base);
      return k < acc.size() ? acc[k] : 0.0;
    }
    double operator()(const MixtureOfGeometric& m) const {
      if (t < 1) return 0.0;
      double p = 0.0;
      for (std::size_t i = 0; i < m.rates.size(); ++i)
        p += m.weights[i] * std::pow(1.0 - m.rates[i], static_cast<double>(t - 1)) * m.rates[i];
      return p;
    }
    double operator()(const Explicit& e) const { return e.pmf.at(t); }
  };
  return std::visit(V{t}, dist.value());
}

namespace {

// Smallest T with (1-r)^T <= tail_eps.
std::int64_t geometric_cutoff(double rate, double tail_eps) {
  double t = std::log(tail_eps) / std::log1p(-rate);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t)));
}

Pmf materialize_geometric(double rate, double tail_eps) {
  std::int64_t cut = geometric_cutoff(rate, tail_eps);
  std::vector<double> m(static_cast<std::size_t>(cut));
  double p = rate;
  for (std::int64_t t = 1; t <= cut; ++t) {
    m[static_cast<std::size_t>(t - 1)] = p;
    p *= (1.0 - rate);
  }
  double tail = std::pow(1.0 - rate, static_cast<double>(cut));
  return Pmf(1, std::move(m), tail);
}

}  // namespace

Pmf materialize(const ParametricDist& dist, double tail_eps) {
  if (!(tail_eps > 0.0) || tail_eps > 1e-3)
    throw DomainError("tail_eps must lie in (0, 1e-3]");
  struct V {
    double eps;
    Pmf operator()(const Deterministic& d) const { return Pmf::delta(d.value); }
    Pmf operator()(const Geometric& g) const { return materialize_geometric(g.rate, eps); }
    Pmf operator()(const TwoPoint& t) const {
      std::vector<double> m(static_cast<std::size_t>(t.n), 0.0);
      m.front() = 1.0 - t.epsilon;
      m.back() = t.epsilon;
      return Pmf(1, std::move(m));
    }
    Pmf operator()(const SumOfGeometric& s) const {
      double stage_eps = eps / static_cast<double>(s.rates.size());
      Pmf acc = materialize_geometric(s.rates.front(), stage_eps);
      for (std::size_t i = 1; i < s.rates.size(); ++i)
        acc = convolve(acc, materialize_geometric(s.rates[i], stage_eps));
      return acc;
    }
    Pmf operator()(const MixtureOfGeometric& m) const {
      // each component already truncated to eps => mixture tail <= eps
      std::vector<Pmf> parts;
      std::int64_t hi = 1;
      for (double r : m.rates) {
        parts.push_back(materialize_geometric(r, eps));
        hi = std::max(hi, parts.back().max_support());
      }
      std::vector<double> out(static_cast<std::size_t>(hi), 0.0);
      double tail = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::int64_t t = 1; t <= parts[i].max_support(); ++t)
          out[static_cast<std::size_t>(t - 1)] += m.weights[i] * parts[i].at(t);
        tail += m.weights[i] * parts[i].tail_bound();
      }
      return Pmf(1, std::move(out), tail);
    }
    Pmf operator()(const Explicit& e) const { return e.pmf; }
  };
  return std::visit(V{tail_eps}, dist.value());
}

double gf_eval(const ParametricDist& dist, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("gf_eval alpha must lie in (0,1), got " + std::to_string(alpha));
  struct V {
    double a;
    double geo(double r) const { return a * r / (1.0 - a * (1.0 - r)); }
    double operator()(const Deterministic& d) const {
      return std::pow(a, static_cast<double>(d.value));
    }
    double operator()(const Geometric& g) const { return geo(g.rate); }
    double operator()(const TwoPoint& t) const {
      return (1.0 - t.epsilon) * a + t.epsilon * std::pow(a, static_cast<double>(t.n));
    }
    double operator()(const SumOfGeometric& s) const {
      double p = 1.0;
      for (double r : s.rates) p *= geo(r);
      return p;
    }
    double operator()(const MixtureOfGeometric& m) const {
      KahanSum acc;
      for (std::size_t i = 0; i < m.rates.size(); ++i) acc.add(m.weights[i] * geo(m.rates[i]));
      return acc.value();
    }
    double operator()(const Explicit& e) const {
      KahanSum acc;
      const Pmf& p = e.pmf;
      for (std::size_t k = 0; k < p.size(); ++k)
        acc.add(p.masses()[k] *
                std::pow(a, static_cast<double>(p.offset() + static_cast<std::int64_t>(k))));
      return acc.value();
    }
  };
  return std::visit(V{alpha}, dist.value());
}

// ---------------------------------------------------------------------------

DistSampler::DistSampler(ParametricDist dist) : dist_(std::move(dist)) {
  if (const auto* e = dist_.get_if<Explicit>()) {
    cdf_.reserve(e->pmf.size());
    double c = 0.0;
    for (double m : e->pmf.masses()) {
      c += m;
      cdf_.push_back(c);
    }
    cdf_.back() = 1.0;  // absorb rounding so sampling always terminates
  } else if (const auto* m = dist_.get_if<MixtureOfGeometric>()) {
    cdf_.reserve(m->weights.size());
    double c = 0.0;
    for (double w : m->weights) {
      c += w;
      cdf_.push_back(c);
    }
    cdf_.back() = 1.0;
  }
}

namespace {

// Inversion: P(T > m) = (1-r)^m, support {1,2,...}.
std::int64_t sample_geometric(double rate, RngStream& rng) {
  double u = rng.uniform01_open();
  return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-rate)));
}

}  // namespace

std::int64_t DistSampler::sample(RngStream& rng) const {
  struct V {
    RngStream& rng;
    const std::vector<double>& cdf;
    std::int64_t operator()(const Deterministic& d) const { return d.value; }
    std::int64_t operator()(const Geometric& g) const { return sample_geometric(g.rate, rng); }
    std::int64_t operator()(const TwoPoint& t) const {
      return rng.uniform01() < 1.0 - t.epsilon ? 1 : t.n;
    }
    std::int64_t operator()(const SumOfGeometric& s) const {
      std::int64_t total = 0;
      for (double r : s.rates) total += sample_geometric(r, rng);
      return total;
    }
    std::int64_t operator()(const MixtureOfGeometric& m) const {
      double u = rng.uniform01();
      std::size_t i = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (i >= m.rates.size()) i = m.rates.size() - 1;
      return sample_geometric(m.rates[i], rng);
    }
    std::int64_t operator()(const Explicit& e) const {
      double u = rng.uniform01();
      std::size_t i = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (i >= e.pmf.size()) i = e.pmf.size() - 1;
      return e.pmf.offset() + static_cast<std::int64_t>(i);
    }
  };
  return std::visit(V{rng, cdf_}, dist_.value());
}

}  // namespace queuechan
