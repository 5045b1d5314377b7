#include "queuechan/coding.hpp"

#include <cmath>
#include <limits>

#include "queuechan/errors.hpp"
#include "queuechan/numeric.hpp"

namespace queuechan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t trial_seed(std::uint64_t base, std::int64_t trial) {
  return detail::splitmix64(detail::splitmix64(base) + static_cast<std::uint64_t>(trial) + 1);
}

double log2_or_neg_inf(double p) { return p > 0.0 ? std::log2(p) : kNegInf; }

// argmax over codewords of sum_i table[i*F + (y_i - cw_i mod F)]; ties break
// toward the lowest index since only a strictly larger score replaces best
std::int64_t ml_decode(const Codebook& cb, std::span<const std::int32_t> y,
                       std::span<const double> table) {
  const int F = cb.alphabet;
  std::int64_t best = 0;
  double best_ll = kNegInf;
  for (std::int64_t m = 0; m < cb.messages; ++m) {
    std::span<const std::int32_t> cw = cb.codeword(m);
    double ll = 0.0;
    for (std::int64_t i = 0; i < cb.n; ++i) {
      int diff = y[static_cast<std::size_t>(i)] - cw[static_cast<std::size_t>(i)];
      if (diff < 0) diff += F;
      ll += table[static_cast<std::size_t>(i) * static_cast<std::size_t>(F) +
                  static_cast<std::size_t>(diff)];
    }
    if (ll > best_ll) {
      best_ll = ll;
      best = m;
    }
  }
  return best;
}

struct TrialTally {
  std::int64_t errors_with = 0;
  std::int64_t errors_without = 0;
  KahanSum duration;
  RunningStat gap;  // without-timestamps error minus with-timestamps error
};

ExperimentResult make_result(DecoderKind decoder, const Codebook& cb, std::int64_t trials,
                             std::int64_t errors, double mean_duration) {
  ExperimentResult r;
  r.decoder = decoder;
  r.n = cb.n;
  r.messages = cb.messages;
  r.trials = trials;
  r.block_errors = errors;
  r.block_error_rate = static_cast<double>(errors) / static_cast<double>(trials);
  r.mean_block_duration_slots = mean_duration;
  r.rate_bits_per_symbol = std::log2(static_cast<double>(cb.messages)) / static_cast<double>(cb.n);
  r.rate_bits_per_slot = std::log2(static_cast<double>(cb.messages)) / mean_duration;
  r.bler_ci = wilson_interval(errors, trials);
  return r;
}

TrialTally run_trials(const Codebook& cb, const SimConfig& cfg, std::int64_t trials,
                      const SolveOptions& opts, bool with_ts, bool without_ts) {
  if (cb.n < 1 || cb.messages < 1) throw DomainError("codebook must have n >= 1, messages >= 1");
  if (cb.messages > kMaxMessages)
    throw DomainError("message count exceeds the exhaustive-decoding cap 2^20");
  if (cb.alphabet != cfg.noise.alphabet_size())
    throw DomainError("codebook and noise model alphabets differ");
  if (trials < 1) throw DomainError("trials must be >= 1");

  const int F = cb.alphabet;
  const std::size_t n = static_cast<std::size_t>(cb.n);
  std::vector<std::int32_t> zeros(n, 0);

  std::vector<double> mixture_log;
  if (without_ts) {
    StationaryDist pi = analytic_pi(cfg, opts);
    Pmf mix = mixture_noise(cfg.noise, pi.masses, pi.tail_bound);
    mixture_log.resize(static_cast<std::size_t>(F));
    for (int s = 0; s < F; ++s) mixture_log[static_cast<std::size_t>(s)] = log2_or_neg_inf(mix.at(s));
  }

  RngStream message_rng(cfg.seed, StreamPurpose::Message);
  TrialTally tally;
  std::vector<double> table_ts(n * static_cast<std::size_t>(F));
  std::vector<double> table_mix(n * static_cast<std::size_t>(F));
  std::vector<std::int32_t> y(n);

  for (std::int64_t trial = 0; trial < trials; ++trial) {
    SimConfig tcfg = cfg;
    tcfg.seed = trial_seed(cfg.seed, trial);
    SimulationTrace trace = simulate_with_inputs(tcfg, zeros);
    tally.duration.add(static_cast<double>(trace.departure_slot.back()));

    std::int64_t m = static_cast<std::int64_t>(
        message_rng.uniform_below(static_cast<std::uint64_t>(cb.messages)));
    std::span<const std::int32_t> cw = cb.codeword(m);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = static_cast<std::int32_t>((cw[i] + trace.z[i]) % F);

    int err_w = 0, err_wo = 0;
    if (with_ts) {
      std::vector<std::int32_t> q =
          reconstruct_queue(trace.arrival_slot, trace.departure_slot);
      for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double>& psi = cfg.noise.psi(q[i]);
        for (int s = 0; s < F; ++s)
          table_ts[i * static_cast<std::size_t>(F) + static_cast<std::size_t>(s)] =
              log2_or_neg_inf(psi[static_cast<std::size_t>(s)]);
      }
      err_w = ml_decode(cb, y, table_ts) != m ? 1 : 0;
      tally.errors_with += err_w;
    }
    if (without_ts) {
      for (std::size_t i = 0; i < n; ++i)
        for (int s = 0; s < F; ++s)
          table_mix[i * static_cast<std::size_t>(F) + static_cast<std::size_t>(s)] =
              mixture_log[static_cast<std::size_t>(s)];
      err_wo = ml_decode(cb, y, table_mix) != m ? 1 : 0;
      tally.errors_without += err_wo;
    }
    if (with_ts && without_ts) tally.gap.add(static_cast<double>(err_wo - err_w));
  }
  return tally;
}

}  // namespace

Codebook Codebook::random(std::int64_t n, std::int64_t messages, int alphabet,
                          std::uint64_t seed) {
  if (n < 1) throw DomainError("block length must be >= 1");
  if (messages < 1) throw DomainError("message count must be >= 1");
  if (messages > kMaxMessages)
    throw DomainError("message count exceeds the exhaustive-decoding cap 2^20");
  if (alphabet < 2) throw DomainError("alphabet size must be >= 2");
  Codebook cb;
  cb.n = n;
  cb.messages = messages;
  cb.alphabet = alphabet;
  cb.seed = seed;
  cb.symbols.resize(static_cast<std::size_t>(n * messages));
  RngStream rng(seed, StreamPurpose::Codebook);
  for (auto& s : cb.symbols)
    s = static_cast<std::int32_t>(rng.uniform_below(static_cast<std::uint64_t>(alphabet)));
  return cb;
}

std::span<const std::int32_t> Codebook::codeword(std::int64_t m) const {
  return {symbols.data() + static_cast<std::size_t>(m * n), static_cast<std::size_t>(n)};
}

std::string decoder_name(DecoderKind d) {
  return d == DecoderKind::WithTimestamps ? "with_timestamps" : "without_timestamps";
}

ConfidenceInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  const double z = 1.959963984540054;  // 97.5th normal quantile
  double t = static_cast<double>(trials);
  double p = static_cast<double>(successes) / t;
  double z2 = z * z;
  double denom = 1.0 + z2 / t;
  double center = (p + z2 / (2.0 * t)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ExperimentResult run_experiment(const Codebook& cb, const SimConfig& cfg, DecoderKind decoder,
                                std::int64_t trials, const SolveOptions& opts) {
  bool with_ts = decoder == DecoderKind::WithTimestamps;
  TrialTally tally = run_trials(cb, cfg, trials, opts, with_ts, !with_ts);
  double mean_duration = tally.duration.value() / static_cast<double>(trials);
  return make_result(decoder, cb, trials, with_ts ? tally.errors_with : tally.errors_without,
                     mean_duration);
}

PairedExperiment run_paired(const Codebook& cb, const SimConfig& cfg, std::int64_t trials,
                            const SolveOptions& opts) {
  TrialTally tally = run_trials(cb, cfg, trials, opts, true, true);
  double mean_duration = tally.duration.value() / static_cast<double>(trials);
  PairedExperiment out;
  out.with_timestamps =
      make_result(DecoderKind::WithTimestamps, cb, trials, tally.errors_with, mean_duration);
  out.without_timestamps = make_result(DecoderKind::WithoutTimestamps, cb, trials,
                                       tally.errors_without, mean_duration);
  out.error_gap_mean = tally.gap.mean();
  out.error_gap_stderr = tally.gap.stderr_of_mean();
  return out;
}

std::vector<ExperimentResult> rate_sweep(const SimConfig& cfg, std::int64_t n,
                                         std::span<const double> rates, std::int64_t trials,
                                         DecoderKind decoder, std::uint64_t codebook_seed,
                                         const SolveOptions& opts) {
  if (n < 1) throw DomainError("block length must be >= 1");
  std::vector<ExperimentResult> out;
  out.reserve(rates.size());
  for (std::size_t r = 0; r < rates.size(); ++r) {
    double rate = rates[r];
    if (rate < 0.0) throw DomainError("rates must be >= 0");
    double m_real = std::round(std::exp2(rate * static_cast<double>(n)));
    if (m_real > static_cast<double>(kMaxMessages))
      throw DomainError("rate " + std::to_string(rate) +
                        " needs more than 2^20 messages at this block length");
    std::int64_t messages = std::max<std::int64_t>(1, static_cast<std::int64_t>(m_real));
    Codebook cb = Codebook::random(n, messages, cfg.noise.alphabet_size(),
                                   codebook_seed + static_cast<std::uint64_t>(r));
    out.push_back(run_experiment(cb, cfg, decoder, trials, opts));
  }
  return out;
}

}  // namespace queuechan
