#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "queuechan/pmf.hpp"

namespace queuechan {

/// Residues 0..size-1 with addition mod size. Only the additive group
/// structure is used anywhere, so any size >= 2 is admissible.
struct Alphabet {
  int size;
};

/// Noise law switches from `low` to `high` once the queue length passes
/// the threshold: psi_q = low for q <= threshold, high for q > threshold.
struct ThresholdedNoise {
  std::int64_t threshold = 0;
  std::vector<double> low;
  std::vector<double> high;
};

/// Explicit per-level laws psi_0..psi_{L-1}; `tail` applies to all larger q.
/// The constant tail is mandatory so penalty sums have a closed tail term.
struct TabulatedNoise {
  std::vector<std::vector<double>> levels;
  std::vector<double> tail;
};

/// -sum p log2 p with 0 log 0 = 0.
double entropy_bits(std::span<const double> pmf);
double entropy_bits(const Pmf& pmf);

/// Queue-length-indexed additive noise over a finite alphabet. Immutable;
/// per-level entropies are cached at construction.
class NoiseModel {
public:
  NoiseModel(Alphabet alphabet, ThresholdedNoise kind);
  NoiseModel(Alphabet alphabet, TabulatedNoise kind);

  int alphabet_size() const { return alphabet_.size; }
  double log_alphabet_bits() const;

  /// Noise law for queue length q (q >= 0).
  const std::vector<double>& psi(std::int64_t q) const;
  /// H(psi_q) in bits, cached.
  double entropy_at(std::int64_t q) const;

  /// First queue length from which psi is constant (threshold+1, or the
  /// tabulation length). psi(q) for any q >= this equals tail_psi().
  std::int64_t constant_from() const;
  const std::vector<double>& tail_psi() const { return psi(constant_from()); }

  bool is_thresholded() const { return std::holds_alternative<ThresholdedNoise>(kind_); }
  const ThresholdedNoise* thresholded() const { return std::get_if<ThresholdedNoise>(&kind_); }
  const TabulatedNoise* tabulated() const { return std::get_if<TabulatedNoise>(&kind_); }

  /// True when every level (and the tail) is the same law; capacity with
  /// and without timestamps coincide exactly in that case.
  bool is_constant() const;

  /// For thresholded models: H(low) <= H(high), the shape the extremal
  /// results assume. Always true for constant models.
  bool entropy_nondecreasing() const;

private:
  Alphabet alphabet_;
  std::variant<ThresholdedNoise, TabulatedNoise> kind_;
  std::vector<double> level_entropy_;  // per tabulation level / {low, high}
  double tail_entropy_ = 0.0;
};

/// {1-p, p} over a binary alphabet.
std::vector<double> binary_flip(double p);

/// Averaged noise law sum_q pi_q psi_q, with the weight not covered by
/// `pi_masses` (i.e. `pi_tail`) assigned to the constant tail law. The
/// per-symbol error of that assignment is at most pi_tail.
Pmf mixture_noise(const NoiseModel& nm, std::span<const double> pi_masses, double pi_tail);

/// sum_q pi_q H(psi_q) in bits, tail weight contributing H(tail_psi)
/// exactly (the law is constant there). Exact whenever pi_masses covers
/// every level below constant_from().
double expected_entropy(const NoiseModel& nm, std::span<const double> pi_masses, double pi_tail);

}  // namespace queuechan
