#include "queuechan/noise.hpp"

#include <cmath>
#include <string>

#include "queuechan/errors.hpp"
#include "queuechan/numeric.hpp"

namespace queuechan {

double entropy_bits(std::span<const double> pmf) {
  KahanSum acc;
  for (double p : pmf) {
    if (p > 0.0) acc.add(-p * std::log2(p));
  }
  return acc.value();
}

double entropy_bits(const Pmf& pmf) {
  return entropy_bits(std::span<const double>(pmf.masses()));
}

namespace {

void validate_psi(const std::vector<double>& psi, int alphabet, const char* what) {
  if (static_cast<int>(psi.size()) != alphabet)
    throw DomainError(std::string(what) + " must list exactly " + std::to_string(alphabet) +
                      " symbol probabilities, got " + std::to_string(psi.size()));
  KahanSum acc;
  for (double p : psi) {
    if (std::isnan(p) || p < 0.0 || p > 1.0)
      throw DomainError(std::string(what) + " has a probability outside [0,1]");
    acc.add(p);
  }
  if (std::abs(acc.value() - 1.0) > 1e-9)
    throw DomainError(std::string(what) + " must sum to 1, got " + std::to_string(acc.value()));
}

void validate_alphabet(Alphabet a) {
  if (a.size < 2) throw DomainError("alphabet size must be >= 2");
}

}  // namespace

NoiseModel::NoiseModel(Alphabet alphabet, ThresholdedNoise kind)
    : alphabet_(alphabet), kind_(std::move(kind)) {
  validate_alphabet(alphabet_);
  const auto& t = std::get<ThresholdedNoise>(kind_);
  if (t.threshold < 0) throw DomainError("noise threshold must be >= 0");
  validate_psi(t.low, alphabet_.size, "psi_low");
  validate_psi(t.high, alphabet_.size, "psi_high");
  level_entropy_ = {entropy_bits(t.low), entropy_bits(t.high)};
  tail_entropy_ = level_entropy_[1];
}

NoiseModel::NoiseModel(Alphabet alphabet, TabulatedNoise kind)
    : alphabet_(alphabet), kind_(std::move(kind)) {
  validate_alphabet(alphabet_);
  const auto& t = std::get<TabulatedNoise>(kind_);
  validate_psi(t.tail, alphabet_.size, "tail_psi");
  level_entropy_.reserve(t.levels.size());
  for (const auto& psi : t.levels) {
    validate_psi(psi, alphabet_.size, "tabulated psi");
    level_entropy_.push_back(entropy_bits(psi));
  }
  tail_entropy_ = entropy_bits(t.tail);
}

double NoiseModel::log_alphabet_bits() const {
  return std::log2(static_cast<double>(alphabet_.size));
}

const std::vector<double>& NoiseModel::psi(std::int64_t q) const {
  if (q < 0) throw DomainError("queue length must be >= 0");
  if (const auto* t = std::get_if<ThresholdedNoise>(&kind_))
    return q <= t->threshold ? t->low : t->high;
  const auto& tab = std::get<TabulatedNoise>(kind_);
  if (q < static_cast<std::int64_t>(tab.levels.size()))
    return tab.levels[static_cast<std::size_t>(q)];
  return tab.tail;
}

double NoiseModel::entropy_at(std::int64_t q) const {
  if (q < 0) throw DomainError("queue length must be >= 0");
  if (const auto* t = std::get_if<ThresholdedNoise>(&kind_))
    return q <= t->threshold ? level_entropy_[0] : level_entropy_[1];
  const auto& tab = std::get<TabulatedNoise>(kind_);
  if (q < static_cast<std::int64_t>(tab.levels.size()))
    return level_entropy_[static_cast<std::size_t>(q)];
  return tail_entropy_;
}

std::int64_t NoiseModel::constant_from() const {
  if (const auto* t = std::get_if<ThresholdedNoise>(&kind_)) return t->threshold + 1;
  return static_cast<std::int64_t>(std::get<TabulatedNoise>(kind_).levels.size());
}

bool NoiseModel::is_constant() const {
  const auto& tail = tail_psi();
  for (std::int64_t q = 0; q < constant_from(); ++q) {
    if (psi(q) != tail) return false;
  }
  return true;
}

bool NoiseModel::entropy_nondecreasing() const {
  double prev = entropy_at(0);
  for (std::int64_t q = 1; q <= constant_from(); ++q) {
    double h = entropy_at(q);
    if (h < prev - 1e-12) return false;
    prev = h;
  }
  return true;
}

std::vector<double> binary_flip(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("flip probability must lie in [0,1]");
  return {1.0 - p, p};
}

Pmf mixture_noise(const NoiseModel& nm, std::span<const double> pi_masses, double pi_tail) {
  std::size_t n = static_cast<std::size_t>(nm.alphabet_size());
  std::vector<KahanSum> acc(n);
  for (std::size_t q = 0; q < pi_masses.size(); ++q) {
    const auto& psi = nm.psi(static_cast<std::int64_t>(q));
    for (std::size_t s = 0; s < n; ++s) acc[s].add(pi_masses[q] * psi[s]);
  }
  const auto& tail = nm.tail_psi();
  for (std::size_t s = 0; s < n; ++s) acc[s].add(pi_tail * tail[s]);
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = acc[s].value();
  // tiny normalization drift from the weighted sum is absorbed here so the
  // result is a valid pmf; drift is bounded by accumulated rounding only
  double total = compensated_sum(out);
  for (double& v : out) v /= total;
  return Pmf(0, std::move(out));
}

double expected_entropy(const NoiseModel& nm, std::span<const double> pi_masses, double pi_tail) {
  KahanSum acc;
  // beyond constant_from() the entropy is flat, so group that weight
  std::int64_t flat_from = nm.constant_from();
  double flat_weight = pi_tail;
  for (std::size_t q = 0; q < pi_masses.size(); ++q) {
    if (static_cast<std::int64_t>(q) >= flat_from)
      flat_weight += pi_masses[q];
    else
      acc.add(pi_masses[q] * nm.entropy_at(static_cast<std::int64_t>(q)));
  }
  acc.add(flat_weight * nm.entropy_at(flat_from));
  return acc.value();
}

}  // namespace queuechan
