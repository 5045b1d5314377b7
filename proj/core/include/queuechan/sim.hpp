#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "queuechan/noise.hpp"
#include "queuechan/pmf.hpp"
#include "queuechan/rng.hpp"

namespace queuechan {

/// How jobs enter the queue: independent inter-arrival gaps (at most one
/// arrival per slot, law on {1,2,...}) or an i.i.d. batch size drawn every
/// slot (law on {0,1,...}).
enum class ArrivalMode { InterarrivalTimes, PerSlotBatches };

struct SimConfig {
  ArrivalMode arrival_mode = ArrivalMode::InterarrivalTimes;
  ParametricDist arrival;  // inter-arrival law or per-slot batch law
  ParametricDist service;
  NoiseModel noise;
  std::int64_t horizon_departures = 0;
  std::int64_t warmup_departures = -1;  // negative selects the default, 10% of horizon
  std::uint64_t seed = 0;
  bool record_per_slot = false;

  /// Warmup actually applied (default when the field is negative).
  std::int64_t resolved_warmup() const {
    return warmup_departures >= 0 ? warmup_departures : horizon_departures / 10;
  }
};

/// Per-job history in departure order (FIFO, so also dispatch order).
/// Slot conventions: arrivals land at the start of a slot, at most one job
/// departs per slot and it leaves at the slot's end; a job with service 1
/// can depart in its arrival slot. queue_at_departure excludes the departer.
struct SimulationTrace {
  std::vector<std::int64_t> arrival_slot;
  std::vector<std::int64_t> departure_slot;
  std::vector<std::int64_t> service;
  std::vector<std::int32_t> queue_at_departure;
  std::vector<std::int32_t> x;  // input symbol
  std::vector<std::int32_t> z;  // noise symbol
  std::vector<std::int32_t> y;  // (x + z) mod |F|
  /// System size while each slot is served (arrivals of that slot included,
  /// its departure not yet removed); filled only when record_per_slot.
  std::vector<std::int64_t> per_slot_queue;
  std::int64_t last_slot = 0;

  std::size_t size() const { return departure_slot.size(); }
  std::int64_t sojourn(std::size_t i) const { return departure_slot[i] - arrival_slot[i] + 1; }
};

struct EmpiricalSummary {
  Pmf empirical_pi;
  double info_density_mean = 0.0;
  double info_density_stderr = 0.0;
  std::size_t jobs_used = 0;
};

/// Runs the slot loop until horizon_departures jobs have departed; input
/// symbols are drawn i.i.d. uniform. Deterministic given the seed: arrival,
/// service, noise, and input draws come from four independent substreams.
SimulationTrace simulate(const SimConfig& cfg);

/// Same dynamics, but job i carries inputs[i] (dispatch order), arrivals
/// stop once inputs.size() jobs have entered, and the queue drains so every
/// job departs. The channel realization (timestamps, queue lengths, noise)
/// depends only on the seed, never on the inputs.
SimulationTrace simulate_with_inputs(const SimConfig& cfg, std::span<const std::int32_t> inputs);

/// Normalized histogram of queue_at_departure over post-warmup jobs.
Pmf empirical_pi(const SimulationTrace& trace, std::int64_t warmup);

/// Recomputes each queue-at-departure value purely from timestamps:
/// Q_i = #{j : A_j <= D_i < D_j}. This is what a receiver that sees only
/// (A^n, D^n) can compute, and it equals the simulator's own bookkeeping.
std::vector<std::int32_t> reconstruct_queue(std::span<const std::int64_t> arrivals,
                                            std::span<const std::int64_t> departures);

/// Mean and standard error of log2|F| + log2 psi_{Q_i}(Z_i) over post-warmup
/// jobs, plus the empirical queue law. The mean estimates capacity divided
/// by the arrival rate.
EmpiricalSummary info_density_estimate(const SimulationTrace& trace, const NoiseModel& nm,
                                       std::int64_t warmup);

/// CSV export: job_index,arrival_slot,departure_slot,service,queue_at_departure,x,z,y.
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

}  // namespace queuechan
