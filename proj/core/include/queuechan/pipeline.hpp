#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "queuechan/capacity.hpp"
#include "queuechan/sim.hpp"

namespace queuechan {

/// Which analytic solution path a configuration admits.
///  - GeometricService: geometric service law; fixed-point sigma gives the
///    geometric stationary form for any inter-arrival law.
///  - BernoulliArrivals: geometric inter-arrivals (one Bernoulli coin per
///    slot); the k-kernel balance recursion handles any service law.
///  - BatchArrivals: per-slot batches; batch k-kernel plus the recursion.
/// A configuration with both geometric service and geometric inter-arrivals
/// is classified GeometricService.
enum class SystemKind { GeometricService, BernoulliArrivals, BatchArrivals };

struct SolveOptions {
  std::int64_t q_max = kDefaultQMax;
  std::int64_t j_max = kDefaultJMax;
  double tail_eps = kDefaultTailEps;
};

std::string system_kind_name(SystemKind kind);

SystemKind classify(const SimConfig& cfg);

/// Jobs per slot entering the system: 1/E[inter-arrival] or E[batch].
double arrival_rate(const SimConfig& cfg);
/// 1/E[service].
double service_rate(const SimConfig& cfg);

/// Stationary departure-queue law along the classified path.
StationaryDist analytic_pi(const SimConfig& cfg, const SolveOptions& opts = {});

/// Capacity along the classified path; timestamps=false selects the
/// mixture-entropy penalty (decoder without arrival/departure times).
CapacityReport analytic_capacity(const SimConfig& cfg, const SolveOptions& opts = {},
                                 bool timestamps = true);

/// One grid point of a capacity-vs-arrival-rate sweep with geometric
/// inter-arrivals and geometric service. A failed point carries its error
/// and NaN values; the sweep always continues.
struct SweepPoint {
  double lambda = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double pi0 = 0.0;
  double capacity = 0.0;
  double capacity_no_ts = 0.0;
  std::string error;  // empty on success
};

/// Evaluates every (lambda, mu) pair, optionally on `jobs` threads; the
/// returned order is the row-major grid order regardless of concurrency.
std::vector<SweepPoint> sweep_geometric(std::span<const double> lambdas,
                                        std::span<const double> mus, const NoiseModel& nm,
                                        const SolveOptions& opts = {}, int jobs = 1);

}  // namespace queuechan
