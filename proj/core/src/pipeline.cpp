#include "queuechan/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "queuechan/errors.hpp"

namespace queuechan {

std::string system_kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::GeometricService: return "geometric_service";
    case SystemKind::BernoulliArrivals: return "bernoulli_arrivals";
    case SystemKind::BatchArrivals: return "batch_arrivals";
  }
  return "unknown";
}

SystemKind classify(const SimConfig& cfg) {
  if (cfg.arrival_mode == ArrivalMode::PerSlotBatches) return SystemKind::BatchArrivals;
  if (cfg.service.kind() == "geometric") return SystemKind::GeometricService;
  if (cfg.arrival.kind() == "geometric") return SystemKind::BernoulliArrivals;
  throw AssumptionViolation(
      "no analytic path for this configuration: need geometric service, geometric "
      "inter-arrivals, or per-slot batch arrivals");
}

double arrival_rate(const SimConfig& cfg) {
  return cfg.arrival_mode == ArrivalMode::PerSlotBatches ? rate_from_batch(cfg.arrival)
                                                         : rate_from_interarrival(cfg.arrival);
}

double service_rate(const SimConfig& cfg) { return rate_from_service(cfg.service); }

StationaryDist analytic_pi(const SimConfig& cfg, const SolveOptions& opts) {
  double lambda = arrival_rate(cfg);
  double mu = service_rate(cfg);
  switch (classify(cfg)) {
    case SystemKind::GeometricService:
      return stationary_g_geo1(cfg.arrival, mu, opts.q_max);
    case SystemKind::BernoulliArrivals: {
      KCoefficients k = k_coefficients_geo_g1(lambda, cfg.service, opts.j_max, opts.tail_eps);
      return stationary_from_k(k, lambda, mu, opts.q_max);
    }
    case SystemKind::BatchArrivals: {
      KCoefficients k = k_coefficients_type2(cfg.arrival, cfg.service, opts.j_max, opts.tail_eps);
      return stationary_from_k(k, lambda, mu, opts.q_max);
    }
  }
  throw AssumptionViolation("unreachable system kind");
}

CapacityReport analytic_capacity(const SimConfig& cfg, const SolveOptions& opts,
                                 bool timestamps) {
  double lambda = arrival_rate(cfg);
  SystemKind kind = classify(cfg);
  StationaryDist pi = analytic_pi(cfg, opts);
  if (!timestamps) return capacity_no_timestamps(lambda, pi, cfg.noise);
  CapacityReport::Method method = CapacityReport::Method::GeometricForm;
  if (kind == SystemKind::BernoulliArrivals)
    method = CapacityReport::Method::EmbeddedRecursion;
  else if (kind == SystemKind::BatchArrivals)
    method = CapacityReport::Method::BatchRecursion;
  return capacity(lambda, pi, cfg.noise, method);
}

std::vector<SweepPoint> sweep_geometric(std::span<const double> lambdas,
                                        std::span<const double> mus, const NoiseModel& nm,
                                        const SolveOptions& opts, int jobs) {
  std::vector<SweepPoint> points(lambdas.size() * mus.size());

  auto eval_point = [&](std::size_t idx) {
    SweepPoint& p = points[idx];
    p.mu = mus[idx / lambdas.size()];
    p.lambda = lambdas[idx % lambdas.size()];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      StationaryDist pi = stationary_g_geo1(Geometric{p.lambda}, p.mu, opts.q_max);
      p.sigma = *pi.sigma;
      p.pi0 = pi.masses[0];
      p.capacity = capacity(p.lambda, pi, nm).capacity_bits_per_slot;
      p.capacity_no_ts = capacity_no_timestamps(p.lambda, pi, nm).capacity_bits_per_slot;
    } catch (const Error& e) {
      p.sigma = p.pi0 = p.capacity = p.capacity_no_ts = nan;
      p.error = std::string(e.kind()) + ": " + e.what();
    }
  };

  if (jobs <= 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) eval_point(i);
    return points;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
      eval_point(i);
  };
  std::vector<std::thread> pool;
  std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), points.size());
  pool.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return points;
}

}  // namespace queuechan
