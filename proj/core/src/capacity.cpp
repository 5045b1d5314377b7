#include "queuechan/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "queuechan/errors.hpp"
#include "queuechan/numeric.hpp"

namespace queuechan {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw DomainError("lambda must lie in (0,1), got " + std::to_string(lambda));
}

void check_lambda_mu(double lambda, double mu) {
  check_lambda(lambda);
  if (!(mu > 0.0) || !(mu < 1.0))
    throw DomainError("mu must lie in (0,1), got " + std::to_string(mu));
  if (lambda >= mu)
    throw StabilityViolation("requires lambda < mu, got lambda = " + std::to_string(lambda) +
                             ", mu = " + std::to_string(mu));
}

void check_qmax(std::int64_t q_max) {
  if (q_max < 1) throw DomainError("q_max must be >= 1");
}

}  // namespace

StationaryDist::StationaryDist(std::vector<double> masses_, double tail_bound_, Form form_,
                               std::optional<double> sigma_)
    : masses(std::move(masses_)), tail_bound(tail_bound_), form(form_), sigma(sigma_) {
  if (masses.empty()) throw DomainError("stationary distribution must have at least one mass");
  if (!(tail_bound >= 0.0) || tail_bound > 1.0)
    throw DomainError("stationary tail bound must lie in [0,1]");
  KahanSum acc;
  for (double& m : masses) {
    if (std::isnan(m) || m < -1e-12)
      throw DomainError("stationary mass negative beyond numerical slack");
    if (m < 0.0) m = 0.0;
    acc.add(m);
  }
  double total = acc.value() + tail_bound;
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("stationary masses + tail must sum to 1, got " + std::to_string(total));
}

double StationaryDist::upper_tail(std::int64_t q) const {
  KahanSum acc;
  for (std::size_t i = q < 0 ? 0 : static_cast<std::size_t>(q); i < masses.size(); ++i)
    acc.add(masses[i]);
  return acc.value() + tail_bound;
}

double KCoefficients::mean() const {
  KahanSum acc;
  for (std::size_t j = 1; j < k.size(); ++j) acc.add(static_cast<double>(j) * k[j]);
  return acc.value();
}

std::string method_name(CapacityReport::Method m) {
  switch (m) {
    case CapacityReport::Method::GeometricForm: return "geometric_form";
    case CapacityReport::Method::EmbeddedRecursion: return "embedded_recursion";
    case CapacityReport::Method::BatchRecursion: return "batch_recursion";
    case CapacityReport::Method::NoTimestamps: return "no_timestamps";
    case CapacityReport::Method::LowerBound: return "lower_bound";
    case CapacityReport::Method::UpperBound: return "upper_bound";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

double atilde(const ParametricDist& p_A, double mu, double x) {
  if (!(mu > 0.0) || !(mu < 1.0)) throw DomainError("mu must lie in (0,1)");
  if (!(x >= 0.0) || !(x < 1.0)) throw DomainError("fixed-point argument must lie in [0,1)");
  if (min_support(p_A) < 1)
    throw DomainError("inter-arrival law must have support in {1,2,...}");
  return gf_eval(p_A, 1.0 - mu + mu * x);
}

double solve_sigma(const ParametricDist& p_A, double mu) {
  double lambda = rate_from_interarrival(p_A);
  check_lambda_mu(lambda, mu);

  auto g = [&](double x) { return atilde(p_A, mu, x) - x; };

  // g(0+) > 0 and g(1-delta) < 0 for small delta; the remaining sign change
  // pins the interior root (x=1 is always a root, excluded by the offset).
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (double delta = 1e-6; delta >= 0.9e-14; delta *= 1e-2) {
    lo = delta;
    hi = 1.0 - delta;
    if (g(lo) > 0.0 && g(hi) < 0.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed)
    throw NoBracket(
        "no sign change for the fixed-point residual down to offset 1e-14; "
        "the arrival law violates the model assumptions");

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (std::abs(gm) <= 1e-13 && hi - lo <= 1e-12) break;
    if (gm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 4e-16 * std::max(1.0, mid)) break;
  }
  if (std::abs(g(mid)) > 1e-12)
    throw NoBracket("bisection failed to reach fixed-point residual 1e-12");
  return mid;
}

double sigma_closed_form_geo(double lambda, double mu) {
  check_lambda_mu(lambda, mu);
  return lambda * (1.0 - mu) / (mu * (1.0 - lambda));
}

StationaryDist stationary_g_geo1(const ParametricDist& p_A, double mu, std::int64_t q_max) {
  check_qmax(q_max);
  double sigma = solve_sigma(p_A, mu);
  std::vector<double> pi(static_cast<std::size_t>(q_max) + 1);
  double term = 1.0 - sigma;
  for (auto& m : pi) {
    m = term;
    term *= sigma;
  }
  // term is now (1-sigma) sigma^(q_max+1); the true tail is sigma^(q_max+1)
  double tail = term / (1.0 - sigma);
  return StationaryDist(std::move(pi), tail, StationaryDist::Form::Geometric, sigma);
}

// ---------------------------------------------------------------------------

KCoefficients k_coefficients_geo_g1(double lambda, const ParametricDist& p_S,
                                    std::int64_t j_max, double tail_eps) {
  check_lambda(lambda);
  if (j_max < 1) throw DomainError("j_max must be >= 1");
  if (min_support(p_S) < 1) throw DomainError("service law must have support in {1,2,...}");

  Pmf ps = materialize(p_S, tail_eps);
  std::vector<KahanSum> acc(static_cast<std::size_t>(j_max) + 1);
  for (std::size_t idx = 0; idx < ps.size(); ++idx) {
    double p = ps.masses()[idx];
    if (p == 0.0) continue;
    std::int64_t t = ps.offset() + static_cast<std::int64_t>(idx);
    // binomial(t, lambda) masses, built incrementally
    double b = std::pow(1.0 - lambda, static_cast<double>(t));
    std::int64_t jcap = std::min(t, j_max);
    for (std::int64_t j = 0; j <= jcap; ++j) {
      acc[static_cast<std::size_t>(j)].add(p * b);
      b *= static_cast<double>(t - j) / static_cast<double>(j + 1) * lambda / (1.0 - lambda);
    }
  }

  KCoefficients out;
  out.source = KCoefficients::Source::PerSlotBernoulli;
  out.k.resize(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) out.k[j] = acc[j].value();
  while (out.k.size() > 1 && out.k.back() == 0.0) out.k.pop_back();
  out.tail_bound = std::clamp(1.0 - compensated_sum(out.k), 0.0, 1.0);
  return out;
}

KCoefficients k_coefficients_type2(const ParametricDist& m_A, const ParametricDist& p_S,
                                   std::int64_t j_max, double tail_eps) {
  if (j_max < 1) throw DomainError("j_max must be >= 1");
  if (min_support(p_S) < 1) throw DomainError("service law must have support in {1,2,...}");
  double lambda = rate_from_batch(m_A);
  double mean_s = moments(p_S).mean;
  if (!(lambda > 0.0)) throw DomainError("batch law must have positive mean");
  if (lambda * mean_s >= 1.0)
    throw StabilityViolation("mean batch size times mean service must be < 1, got " +
                             std::to_string(lambda * mean_s));
  if (!(mass_at(m_A, 1) > 0.0))
    throw AssumptionViolation(
        "batch law must put positive mass on size 1 (otherwise the embedded chain "
        "can be reducible)");

  Pmf ps = materialize(p_S, tail_eps / 2.0);
  Pmf ma = materialize(m_A, tail_eps / 2.0);

  // law of N_1+..+N_t truncated at j_max; mass pushed beyond j_max can never
  // return (batches are nonnegative), so the stored window stays exact
  std::vector<double> cur(static_cast<std::size_t>(j_max) + 1, 0.0);
  cur[0] = 1.0;
  std::vector<KahanSum> acc(static_cast<std::size_t>(j_max) + 1);
  std::vector<double> next(cur.size());
  for (std::int64_t t = 1; t <= ps.max_support(); ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double ci = cur[i];
      if (ci == 0.0) continue;
      for (std::size_t jdx = 0; jdx < ma.size(); ++jdx) {
        std::int64_t j = static_cast<std::int64_t>(i) + ma.offset() + static_cast<std::int64_t>(jdx);
        if (j > j_max) break;
        next[static_cast<std::size_t>(j)] += ci * ma.masses()[jdx];
      }
    }
    cur.swap(next);
    double pt = ps.at(t);
    if (pt > 0.0) {
      for (std::size_t j = 0; j < cur.size(); ++j) {
        if (cur[j] != 0.0) acc[j].add(pt * cur[j]);
      }
    }
  }

  KCoefficients out;
  out.source = KCoefficients::Source::Batch;
  out.k.resize(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) out.k[j] = acc[j].value();
  while (out.k.size() > 1 && out.k.back() == 0.0) out.k.pop_back();
  out.tail_bound = std::clamp(1.0 - compensated_sum(out.k), 0.0, 1.0);
  return out;
}

StationaryDist stationary_from_k(const KCoefficients& k, double lambda, double mu,
                                 std::int64_t q_max) {
  check_lambda_mu(lambda, mu);
  check_qmax(q_max);
  if (k.k.empty() || !(k.k[0] > 0.0))
    throw DomainError("k_0 must be positive for the balance recursion");

  double k0 = k.k[0];
  std::vector<double> pi;
  pi.reserve(static_cast<std::size_t>(q_max) + 1);
  pi.push_back(1.0 - lambda / mu);
  pi.push_back(pi[0] * (1.0 - k0) / k0);
  for (std::int64_t q = 1; q < q_max; ++q) {
    KahanSum removed;
    removed.add(pi[0] * k.at(q));
    for (std::int64_t j = 1; j <= q; ++j)
      removed.add(pi[static_cast<std::size_t>(j)] * k.at(q - j + 1));
    double val = (pi[static_cast<std::size_t>(q)] - removed.value()) / k0;
    if (val < -1e-9)
      throw RecursionUnstable("stationary iterate " + std::to_string(val) + " at q = " +
                              std::to_string(q + 1) +
                              "; increase j_max or tighten tail_eps");
    pi.push_back(std::max(val, 0.0));
  }

  // A truncated kernel (sum k_j = 1 - tail) makes the recursion drift off
  // the simplex by an amplified multiple of that tail. Project back and add
  // the observed drift to the certified bound so it is never silently lost.
  double sum = compensated_sum(pi);
  double drift = std::abs(sum + k.tail_bound - 1.0);
  double tail = std::min(k.tail_bound + drift, 1.0);
  double scale = (1.0 - tail) / sum;
  for (double& m : pi) m *= scale;
  return StationaryDist(std::move(pi), tail, StationaryDist::Form::Recursive);
}

// ---------------------------------------------------------------------------

CapacityReport capacity(double lambda, const StationaryDist& pi, const NoiseModel& nm,
                        std::optional<CapacityReport::Method> method) {
  check_lambda(lambda);
  CapacityReport rep;
  rep.lambda = lambda;
  rep.log_alphabet = nm.log_alphabet_bits();
  rep.noise_penalty = expected_entropy(nm, pi.masses, pi.tail_bound);
  rep.capacity_bits_per_slot = lambda * (rep.log_alphabet - rep.noise_penalty);
  rep.error_bound = lambda * pi.tail_bound * rep.log_alphabet;
  rep.method = method.value_or(pi.form == StationaryDist::Form::Geometric
                                   ? CapacityReport::Method::GeometricForm
                                   : CapacityReport::Method::EmbeddedRecursion);
  return rep;
}

CapacityReport capacity_no_timestamps(double lambda, const StationaryDist& pi,
                                      const NoiseModel& nm) {
  check_lambda(lambda);
  CapacityReport rep;
  rep.lambda = lambda;
  rep.log_alphabet = nm.log_alphabet_bits();
  rep.noise_penalty = entropy_bits(mixture_noise(nm, pi.masses, pi.tail_bound));
  rep.capacity_bits_per_slot = lambda * (rep.log_alphabet - rep.noise_penalty);
  rep.error_bound = lambda * pi.tail_bound * rep.log_alphabet;
  rep.method = CapacityReport::Method::NoTimestamps;
  return rep;
}

CapacityReport capacity_bound_from_m0(double lambda, double mu, const ParametricDist& p_S,
                                      double m0, const NoiseModel& nm, BoundSide which) {
  check_lambda(lambda);
  if (!(mu > 0.0) || mu > 1.0) throw DomainError("mu must lie in (0,1]");
  if (lambda >= mu)
    throw StabilityViolation("requires lambda < mu for the bound to be meaningful");
  if (min_support(p_S) < 1) throw DomainError("service law must have support in {1,2,...}");
  const ThresholdedNoise* t = nm.thresholded();
  if (t == nullptr || t->threshold != 1)
    throw AssumptionViolation(
        "bound requires two-level noise switching above queue length 1 (threshold 1)");
  double h0 = nm.entropy_at(0);
  double h2 = nm.entropy_at(2);
  if (h0 > h2 + 1e-12)
    throw AssumptionViolation("bound requires the low-queue noise entropy not to exceed "
                              "the high-queue one");
  if (!(m0 > 0.0) || !(m0 < 1.0))
    throw ConventionError(
        "empty-slot probability m0 = " + std::to_string(m0) +
        " lies outside (0,1); the arrival-rate convention in use (mean batch size "
        "per slot vs. its reciprocal) does not fit this parameter set — supply m0 "
        "directly for the convention you intend");

  double k0 = gf_eval(p_S, m0);
  double occupancy01 = (1.0 - lambda / mu) / k0;  // P(queue <= 1) under the extremal law
  CapacityReport rep;
  rep.lambda = lambda;
  rep.log_alphabet = nm.log_alphabet_bits();
  rep.noise_penalty = h2 - (h2 - h0) * occupancy01;
  rep.capacity_bits_per_slot = lambda * (rep.log_alphabet - rep.noise_penalty);
  rep.error_bound = 0.0;
  rep.method = which == BoundSide::Lower ? CapacityReport::Method::LowerBound
                                         : CapacityReport::Method::UpperBound;
  return rep;
}

CapacityReport capacity_bound_type2(double lambda, double mu, const ParametricDist& p_S,
                                    std::int64_t B, const NoiseModel& nm, BoundSide which) {
  if (B < 2) throw DomainError("batch size bound B must be >= 2");
  check_lambda(lambda);
  double m0 = which == BoundSide::Lower ? 1.0 - lambda / static_cast<double>(B)
                                        : 1.0 - lambda;
  return capacity_bound_from_m0(lambda, mu, p_S, m0, nm, which);
}

// ---------------------------------------------------------------------------

ParametricDist extremal_deterministic(double lambda) {
  check_lambda(lambda);
  double m = 1.0 / lambda;
  double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 * std::max(1.0, m))
    throw IntegralityError("deterministic inter-arrival needs integer mean, but 1/lambda = " +
                           std::to_string(m));
  return Deterministic{static_cast<std::int64_t>(rounded)};
}

ParametricDist extremal_two_point(double lambda, double eps0) {
  check_lambda(lambda);
  if (!(eps0 > 0.0) || !(eps0 < 1.0)) throw DomainError("eps0 must lie in (0,1)");
  double m = 1.0 / lambda;
  // smallest integer N >= 1 + (m-1)/eps0 (so the re-solved eps is <= eps0);
  // the 1e-9 slack keeps exact-integer targets from rounding up
  std::int64_t n = std::max<std::int64_t>(
      2, static_cast<std::int64_t>(std::ceil(1.0 + (m - 1.0) / eps0 - 1e-9)));
  double eps = (m - 1.0) / static_cast<double>(n - 1);
  return TwoPoint{eps, n};
}

ParametricDist extremal_geometric(double lambda) {
  check_lambda(lambda);
  return Geometric{lambda};
}

ParametricDist extremal_sum_of_geometric(double lambda, int stages) {
  check_lambda(lambda);
  if (stages < 1) throw DomainError("stage count must be >= 1");
  double rate = static_cast<double>(stages) * lambda;
  if (!(rate < 1.0))
    throw DomainError("cannot split mean 1/lambda into " + std::to_string(stages) +
                      " geometric stages: stage rate " + std::to_string(rate) +
                      " must be < 1 (requires lambda < 1/stages)");
  return SumOfGeometric{std::vector<double>(static_cast<std::size_t>(stages), rate)};
}

ParametricDist extremal_mixture_of_geometric(double lambda, std::vector<double> weights) {
  check_lambda(lambda);
  if (weights.empty()) throw DomainError("mixture needs at least one weight");
  KahanSum wsum;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be strictly positive");
    wsum.add(w);
  }
  if (std::abs(wsum.value() - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
  double scale = static_cast<double>(weights.size()) * lambda;
  std::vector<double> rates(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    rates[i] = scale * weights[i];
    if (!(rates[i] < 1.0))
      throw DomainError("mixture component rate " + std::to_string(rates[i]) +
                        " must be < 1; use smaller weights or lambda");
  }
  return MixtureOfGeometric{std::move(weights), std::move(rates)};
}

// ---------------------------------------------------------------------------

namespace {

double common_mean(const std::vector<ParametricDist>& dists, const char* what) {
  if (dists.empty()) throw DomainError(std::string(what) + ": need at least one distribution");
  double mean = moments(dists.front()).mean;
  for (const auto& d : dists) {
    double m = moments(d).mean;
    if (std::abs(m - mean) > 1e-12)
      throw MeanMismatch(std::string(what) + ": means differ (" + std::to_string(mean) +
                         " vs " + std::to_string(m) + ")");
  }
  return mean;
}

}  // namespace

OrderingTable ordering_check(const std::vector<ParametricDist>& dists, double mu,
                             const NoiseModel& nm, std::int64_t q_max) {
  double mean = common_mean(dists, "ordering check");
  double lambda = 1.0 / mean;
  check_lambda_mu(lambda, mu);

  OrderingTable table;
  table.lambda = lambda;
  table.mu = mu;
  for (const auto& d : dists) {
    OrderingEntry e;
    e.kind = d.kind();
    e.sigma = solve_sigma(d, mu);
    StationaryDist pi = stationary_g_geo1(d, mu, q_max);
    e.capacity = capacity(lambda, pi, nm).capacity_bits_per_slot;
    table.entries.push_back(std::move(e));
  }

  auto add_check = [&](std::size_t hi_idx, std::size_t lo_idx) {
    OrderingCheck c;
    c.description = "capacity[" + std::to_string(hi_idx) + ":" + table.entries[hi_idx].kind +
                    "] >= capacity[" + std::to_string(lo_idx) + ":" +
                    table.entries[lo_idx].kind + "]";
    c.margin = table.entries[hi_idx].capacity - table.entries[lo_idx].capacity;
    c.holds = c.margin >= -1e-12;
    table.capacity_checks.push_back(std::move(c));
  };

  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const std::string& ki = table.entries[i].kind;
    for (std::size_t j = 0; j < table.entries.size(); ++j) {
      if (i == j) continue;
      const std::string& kj = table.entries[j].kind;
      // predicted: deterministic above everything; sum-of-geometric above
      // geometric; geometric above two-point
      if (ki == "deterministic" && kj != "deterministic") add_check(i, j);
      if (ki == "sum_of_geometric" && kj == "geometric") add_check(i, j);
      if (ki == "geometric" && kj == "two_point") add_check(i, j);
    }
  }

  // generating-function curve ordering on an x-grid against the equal-mean
  // geometric: sums lie below it, mixtures above it, pointwise
  ParametricDist geo = Geometric{lambda};
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const std::string kind = dists[i].kind();
    if (kind != "sum_of_geometric" && kind != "mixture_of_geometric") continue;
    double min_margin = 1.0;
    for (int step = 1; step <= 9; ++step) {
      double x = 0.1 * step;
      double margin = kind == "sum_of_geometric"
                          ? atilde(geo, mu, x) - atilde(dists[i], mu, x)
                          : atilde(dists[i], mu, x) - atilde(geo, mu, x);
      min_margin = std::min(min_margin, margin);
    }
    OrderingCheck c;
    c.description = kind == "sum_of_geometric"
                        ? "gf curve[" + std::to_string(i) + ":sum_of_geometric] <= geometric"
                        : "gf curve[" + std::to_string(i) + ":mixture_of_geometric] >= geometric";
    c.margin = min_margin;
    c.holds = min_margin >= -1e-12;
    table.gf_curve_checks.push_back(std::move(c));
  }

  table.all_hold = true;
  for (const auto& c : table.capacity_checks) table.all_hold = table.all_hold && c.holds;
  for (const auto& c : table.gf_curve_checks) table.all_hold = table.all_hold && c.holds;
  return table;
}

namespace {

InvarianceReport summarize_invariance(const std::vector<CapacityReport>& reports) {
  InvarianceReport rep;
  double max_err = 0.0;
  for (const auto& r : reports) {
    rep.capacities.push_back(r.capacity_bits_per_slot);
    max_err = std::max(max_err, r.error_bound);
  }
  for (double a : rep.capacities)
    for (double b : rep.capacities) rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(a - b));
  rep.allowed_dev = 1e-8 + 2.0 * max_err;
  rep.all_equal = rep.max_abs_dev <= rep.allowed_dev;
  return rep;
}

void check_threshold_zero(const NoiseModel& nm) {
  const ThresholdedNoise* t = nm.thresholded();
  if (t == nullptr || t->threshold != 0)
    throw AssumptionViolation(
        "invariance requires two-level noise switching above queue length 0 (threshold 0)");
}

}  // namespace

InvarianceReport invariance_check_service(double lambda,
                                          const std::vector<ParametricDist>& service_dists,
                                          const NoiseModel& nm, std::int64_t q_max,
                                          std::int64_t j_max, double tail_eps) {
  check_threshold_zero(nm);
  double mean = common_mean(service_dists, "service invariance");
  double mu = 1.0 / mean;
  check_lambda_mu(lambda, mu);

  std::vector<CapacityReport> reports;
  for (const auto& d : service_dists) {
    KCoefficients k = k_coefficients_geo_g1(lambda, d, j_max, tail_eps);
    StationaryDist pi = stationary_from_k(k, lambda, mu, q_max);
    reports.push_back(capacity(lambda, pi, nm));
  }
  return summarize_invariance(reports);
}

InvarianceReport invariance_check_batch(const std::vector<ParametricDist>& batch_dists,
                                        const ParametricDist& p_S, const NoiseModel& nm,
                                        std::int64_t q_max, std::int64_t j_max,
                                        double tail_eps) {
  check_threshold_zero(nm);
  if (batch_dists.empty()) throw DomainError("batch invariance: need at least one distribution");
  double lambda = rate_from_batch(batch_dists.front());
  for (const auto& d : batch_dists) {
    if (std::abs(rate_from_batch(d) - lambda) > 1e-12)
      throw MeanMismatch("batch invariance: mean batch sizes differ");
  }
  double mu = 1.0 / moments(p_S).mean;
  check_lambda_mu(lambda, mu);

  std::vector<CapacityReport> reports;
  for (const auto& d : batch_dists) {
    KCoefficients k = k_coefficients_type2(d, p_S, j_max, tail_eps);
    StationaryDist pi = stationary_from_k(k, lambda, mu, q_max);
    reports.push_back(capacity(lambda, pi, nm, CapacityReport::Method::BatchRecursion));
  }
  return summarize_invariance(reports);
}

}  // namespace queuechan
