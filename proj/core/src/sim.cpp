#include "queuechan/sim.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <ostream>

#include "queuechan/errors.hpp"
#include "queuechan/numeric.hpp"

namespace queuechan {

namespace {

constexpr std::size_t kRunawayQueue = 1'000'000;

struct PendingJob {
  std::int64_t arrival;
  std::int64_t service;
  std::int32_t x;
};

std::int32_t sample_symbol(const std::vector<double>& psi, RngStream& rng) {
  double u = rng.uniform01();
  double c = 0.0;
  for (std::size_t s = 0; s + 1 < psi.size(); ++s) {
    c += psi[s];
    if (u < c) return static_cast<std::int32_t>(s);
  }
  return static_cast<std::int32_t>(psi.size() - 1);
}

// Shared slot loop. When `inputs` is non-null, arrivals stop after
// inputs->size() jobs and the run ends when all of them have departed;
// otherwise it ends at cfg.horizon_departures.
SimulationTrace run(const SimConfig& cfg, const std::vector<std::int32_t>* inputs) {
  std::size_t target = inputs != nullptr ? inputs->size()
                                         : static_cast<std::size_t>(cfg.horizon_departures);
  if (target == 0) throw DomainError("simulation needs at least one departure");
  if (inputs == nullptr && cfg.resolved_warmup() >= cfg.horizon_departures)
    throw DomainError("warmup must be smaller than the departure horizon");

  RngStream arrival_rng(cfg.seed, StreamPurpose::Arrival);
  RngStream service_rng(cfg.seed, StreamPurpose::Service);
  RngStream noise_rng(cfg.seed, StreamPurpose::Noise);
  RngStream input_rng(cfg.seed, StreamPurpose::Input);
  DistSampler arrival_sampler(cfg.arrival);
  DistSampler service_sampler(cfg.service);
  const std::int32_t alphabet = static_cast<std::int32_t>(cfg.noise.alphabet_size());

  if (cfg.arrival_mode == ArrivalMode::InterarrivalTimes && min_support(cfg.arrival) < 1)
    throw DomainError("inter-arrival law must have support in {1,2,...}");
  if (min_support(cfg.service) < 1)
    throw DomainError("service law must have support in {1,2,...}");

  SimulationTrace trace;
  trace.arrival_slot.reserve(target);
  trace.departure_slot.reserve(target);
  trace.service.reserve(target);
  trace.queue_at_departure.reserve(target);
  trace.x.reserve(target);
  trace.z.reserve(target);
  trace.y.reserve(target);

  std::deque<PendingJob> queue;
  std::size_t created = 0;
  std::size_t departed = 0;
  std::int64_t remaining = 0;  // head job's unserved slots; 0 = not started

  auto enqueue = [&](std::int64_t t) {
    PendingJob job;
    job.arrival = t;
    job.service = service_sampler.sample(service_rng);
    job.x = inputs != nullptr ? (*inputs)[created]
                              : static_cast<std::int32_t>(input_rng.uniform_below(
                                    static_cast<std::uint64_t>(alphabet)));
    if (inputs != nullptr && (job.x < 0 || job.x >= alphabet))
      throw DomainError("input symbol outside the alphabet");
    queue.push_back(job);
    ++created;
  };

  std::int64_t next_arrival =
      cfg.arrival_mode == ArrivalMode::InterarrivalTimes ? arrival_sampler.sample(arrival_rng)
                                                         : 0;

  for (std::int64_t t = 1; departed < target; ++t) {
    // arrivals at the start of the slot
    if (cfg.arrival_mode == ArrivalMode::InterarrivalTimes) {
      if (created < target || inputs == nullptr) {
        while (next_arrival == t) {
          enqueue(t);
          if (inputs != nullptr && created >= target) break;
          next_arrival = t + arrival_sampler.sample(arrival_rng);
        }
      }
    } else {
      std::int64_t batch = arrival_sampler.sample(arrival_rng);
      for (std::int64_t b = 0; b < batch; ++b) {
        if (inputs != nullptr && created >= target) break;
        enqueue(t);
      }
    }
    if (queue.size() > kRunawayQueue)
      throw SimulationError("queue length exceeded 1e6; the configuration is likely "
                            "unstable (arrival rate >= service rate)");

    if (cfg.record_per_slot) trace.per_slot_queue.push_back(static_cast<std::int64_t>(queue.size()));

    // one slot of service for the head-of-line job
    if (!queue.empty()) {
      if (remaining == 0) remaining = queue.front().service;
      --remaining;
      if (remaining == 0) {
        PendingJob job = queue.front();
        queue.pop_front();
        auto q = static_cast<std::int32_t>(queue.size());  // jobs left behind
        const std::vector<double>& psi = cfg.noise.psi(q);
        std::int32_t zsym = sample_symbol(psi, noise_rng);
        trace.arrival_slot.push_back(job.arrival);
        trace.departure_slot.push_back(t);
        trace.service.push_back(job.service);
        trace.queue_at_departure.push_back(q);
        trace.x.push_back(job.x);
        trace.z.push_back(zsym);
        trace.y.push_back(static_cast<std::int32_t>((job.x + zsym) % alphabet));
        ++departed;
      }
    }
    trace.last_slot = t;
  }
  return trace;
}

}  // namespace

SimulationTrace simulate(const SimConfig& cfg) {
  if (cfg.horizon_departures < 1) throw DomainError("horizon_departures must be >= 1");
  return run(cfg, nullptr);
}

SimulationTrace simulate_with_inputs(const SimConfig& cfg,
                                     std::span<const std::int32_t> inputs) {
  std::vector<std::int32_t> copy(inputs.begin(), inputs.end());
  return run(cfg, &copy);
}

Pmf empirical_pi(const SimulationTrace& trace, std::int64_t warmup) {
  if (warmup < 0) throw DomainError("warmup must be >= 0");
  if (static_cast<std::size_t>(warmup) >= trace.size())
    throw DomainError("trace must have more departures than the warmup");
  std::int32_t max_q = 0;
  for (std::size_t i = static_cast<std::size_t>(warmup); i < trace.size(); ++i)
    max_q = std::max(max_q, trace.queue_at_departure[i]);
  std::vector<double> counts(static_cast<std::size_t>(max_q) + 1, 0.0);
  double total = 0.0;
  for (std::size_t i = static_cast<std::size_t>(warmup); i < trace.size(); ++i) {
    counts[static_cast<std::size_t>(trace.queue_at_departure[i])] += 1.0;
    total += 1.0;
  }
  for (double& c : counts) c /= total;
  return Pmf(0, std::move(counts));
}

std::vector<std::int32_t> reconstruct_queue(std::span<const std::int64_t> arrivals,
                                            std::span<const std::int64_t> departures) {
  if (arrivals.size() != departures.size())
    throw InconsistentTimestamps("arrival and departure lists differ in length");
  std::size_t n = arrivals.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (departures[i] < arrivals[i])
      throw InconsistentTimestamps("departure before arrival at job " + std::to_string(i));
    if (i > 0 && departures[i] <= departures[i - 1])
      throw InconsistentTimestamps("departures must be strictly increasing");
    if (i > 0 && arrivals[i] < arrivals[i - 1])
      throw InconsistentTimestamps("arrivals must be nondecreasing (FIFO dispatch order)");
  }
  std::vector<std::int32_t> q(n);
  std::size_t a = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (a < n && arrivals[a] <= departures[i]) ++a;
    // jobs arrived by D_i minus jobs departed by D_i (which is i+1, FIFO)
    q[i] = static_cast<std::int32_t>(a - i - 1);
  }
  return q;
}

EmpiricalSummary info_density_estimate(const SimulationTrace& trace, const NoiseModel& nm,
                                       std::int64_t warmup) {
  if (warmup < 0) throw DomainError("warmup must be >= 0");
  if (static_cast<std::size_t>(warmup) >= trace.size())
    throw DomainError("trace must have more departures than the warmup");
  double logF = nm.log_alphabet_bits();
  RunningStat stat;
  for (std::size_t i = static_cast<std::size_t>(warmup); i < trace.size(); ++i) {
    const std::vector<double>& psi = nm.psi(trace.queue_at_departure[i]);
    double p = psi[static_cast<std::size_t>(trace.z[i])];
    if (!(p > 0.0))
      throw DegenerateNoise("observed a noise symbol of probability zero at job " +
                            std::to_string(i) + "; trace and noise model disagree");
    stat.add(logF + std::log2(p));
  }
  EmpiricalSummary summary{empirical_pi(trace, warmup), stat.mean(), stat.stderr_of_mean(),
                           static_cast<std::size_t>(stat.count())};
  return summary;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  out << "job_index,arrival_slot,departure_slot,service,queue_at_departure,x,z,y\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << trace.arrival_slot[i] << ',' << trace.departure_slot[i] << ','
        << trace.service[i] << ',' << trace.queue_at_departure[i] << ',' << trace.x[i] << ','
        << trace.z[i] << ',' << trace.y[i] << '\n';
  }
}

}  // namespace queuechan
