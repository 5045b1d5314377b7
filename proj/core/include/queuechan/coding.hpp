#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "queuechan/pipeline.hpp"
#include "queuechan/sim.hpp"

namespace queuechan {

/// Cap on exhaustive maximum-likelihood enumeration.
inline constexpr std::int64_t kMaxMessages = std::int64_t{1} << 20;

/// Random block code: `messages` codewords of `n` alphabet symbols each,
/// drawn i.i.d. uniform from the seed.
struct Codebook {
  std::int64_t n = 0;
  std::int64_t messages = 0;
  int alphabet = 2;
  std::uint64_t seed = 0;
  std::vector<std::int32_t> symbols;  // row-major, messages x n

  static Codebook random(std::int64_t n, std::int64_t messages, int alphabet,
                         std::uint64_t seed);
  std::span<const std::int32_t> codeword(std::int64_t m) const;
};

/// WithTimestamps: the decoder reconstructs per-job queue lengths from
/// (A^n, D^n) and scores candidates under the true per-position noise law.
/// WithoutTimestamps: it only knows the stationary mixture law and scores
/// every position under that single law.
enum class DecoderKind { WithTimestamps, WithoutTimestamps };

std::string decoder_name(DecoderKind d);

/// 95% Wilson score interval for a binomial proportion.
struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};
ConfidenceInterval wilson_interval(std::int64_t successes, std::int64_t trials);

struct ExperimentResult {
  DecoderKind decoder = DecoderKind::WithTimestamps;
  std::int64_t n = 0;
  std::int64_t messages = 0;
  std::int64_t trials = 0;
  std::int64_t block_errors = 0;
  double block_error_rate = 0.0;
  double mean_block_duration_slots = 0.0;  // empirical slots per block
  double rate_bits_per_symbol = 0.0;       // log2(messages)/n
  double rate_bits_per_slot = 0.0;         // log2(messages)/mean duration
  ConfidenceInterval bler_ci;
};

/// Sends a uniformly chosen message per trial through the simulated queue
/// and decodes by exhaustive maximum likelihood (ties -> lowest message
/// index). The channel realization of a trial depends only on the config
/// seed and trial index, never on the codeword, so matched seeds give
/// matched channels across codebooks and decoders.
ExperimentResult run_experiment(const Codebook& cb, const SimConfig& cfg, DecoderKind decoder,
                                std::int64_t trials, const SolveOptions& opts = {});

/// Both decoders on identical channel realizations and message picks.
/// error_gap_* summarize the per-trial indicator difference
/// (without-timestamps error) - (with-timestamps error).
struct PairedExperiment {
  ExperimentResult with_timestamps;
  ExperimentResult without_timestamps;
  double error_gap_mean = 0.0;
  double error_gap_stderr = 0.0;
};
PairedExperiment run_paired(const Codebook& cb, const SimConfig& cfg, std::int64_t trials,
                            const SolveOptions& opts = {});

/// One experiment per requested rate (bits/symbol), |M| = round(2^(rate*n)),
/// each with its own codebook but shared channel randomness across rates.
std::vector<ExperimentResult> rate_sweep(const SimConfig& cfg, std::int64_t n,
                                         std::span<const double> rates, std::int64_t trials,
                                         DecoderKind decoder, std::uint64_t codebook_seed,
                                         const SolveOptions& opts = {});

}  // namespace queuechan
