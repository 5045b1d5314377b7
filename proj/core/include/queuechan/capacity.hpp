#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "queuechan/noise.hpp"
#include "queuechan/pmf.hpp"

namespace queuechan {

inline constexpr std::int64_t kDefaultQMax = 200;
inline constexpr std::int64_t kDefaultJMax = 200;
inline constexpr double kDefaultTailEps = 1e-10;

/// Departure-epoch queue-length distribution, truncated with a certified
/// bound on the omitted mass.
struct StationaryDist {
  enum class Form { Geometric, Recursive };

  std::vector<double> masses;  // pi_0..pi_K
  double tail_bound = 0.0;
  Form form = Form::Recursive;
  std::optional<double> sigma;  // geometric ratio, when form == Geometric

  StationaryDist(std::vector<double> masses_, double tail_bound_, Form form_,
                 std::optional<double> sigma_ = std::nullopt);

  double at(std::int64_t q) const {
    return q >= 0 && q < static_cast<std::int64_t>(masses.size())
               ? masses[static_cast<std::size_t>(q)]
               : 0.0;
  }
  /// P(Q >= q) of the stored part plus the full tail bound (upper bound).
  double upper_tail(std::int64_t q) const;
  Pmf to_pmf() const { return Pmf(0, masses, tail_bound); }
};

/// Arrivals-per-service-time kernel of the departure-embedded chain.
struct KCoefficients {
  enum class Source { PerSlotBernoulli, Batch };

  std::vector<double> k;  // k_0..k_J
  double tail_bound = 0.0;
  Source source = Source::PerSlotBernoulli;

  double at(std::int64_t j) const {
    return j >= 0 && j < static_cast<std::int64_t>(k.size()) ? k[static_cast<std::size_t>(j)]
                                                             : 0.0;
  }
  /// sum_j j*k_j; equals lambda/mu when truncation is negligible (Wald).
  double mean() const;
};

struct CapacityReport {
  enum class Method {
    GeometricForm,      // fixed-point sigma, geometric stationary law
    EmbeddedRecursion,  // per-slot Bernoulli arrivals, k-kernel recursion
    BatchRecursion,     // batch arrivals, k-kernel recursion
    NoTimestamps,       // penalty = entropy of the pi-mixture law
    LowerBound,         // closed-form bounded-batch lower bound
    UpperBound,         // closed-form bounded-batch upper bound
  };

  double capacity_bits_per_slot = 0.0;
  double lambda = 0.0;
  double log_alphabet = 0.0;
  double noise_penalty = 0.0;  // entropy term subtracted from log_alphabet
  double error_bound = 0.0;    // propagated truncation error
  Method method = Method::GeometricForm;
};

std::string method_name(CapacityReport::Method m);

// ---------------------------------------------------------------------------
// Geometric-service path (single arrival per slot at most)
// ---------------------------------------------------------------------------

/// E[(1-mu+mu*x)^A] for the inter-arrival law: the map whose unique fixed
/// point in (0,1) is the geometric ratio of the stationary queue law.
double atilde(const ParametricDist& p_A, double mu, double x);

/// Unique root of atilde(p_A, mu, x) = x in (0,1), by bracketing bisection;
/// the returned value has fixed-point residual <= 1e-12.
double solve_sigma(const ParametricDist& p_A, double mu);

/// lambda*(1-mu) / (mu*(1-lambda)): exact ratio for geometric inter-arrivals.
double sigma_closed_form_geo(double lambda, double mu);

/// pi_q = (1-sigma) sigma^q truncated at q_max, tail sigma^(q_max+1).
StationaryDist stationary_g_geo1(const ParametricDist& p_A, double mu,
                                 std::int64_t q_max = kDefaultQMax);

// ---------------------------------------------------------------------------
// General-service path (embedded-chain kernel + balance recursion)
// ---------------------------------------------------------------------------

/// k_j = sum_t C(t,j) lambda^j (1-lambda)^(t-j) p_S(t): arrivals during one
/// service time under per-slot Bernoulli(lambda) arrivals.
KCoefficients k_coefficients_geo_g1(double lambda, const ParametricDist& p_S,
                                    std::int64_t j_max = kDefaultJMax,
                                    double tail_eps = kDefaultTailEps);

/// k_j = sum_t P(N_1+..+N_t = j) p_S(t) for i.i.d. per-slot batches N ~ m_A.
/// Requires m_A(1) > 0 (irreducibility) and E[m_A]*E[p_S] < 1.
KCoefficients k_coefficients_type2(const ParametricDist& m_A, const ParametricDist& p_S,
                                   std::int64_t j_max = kDefaultJMax,
                                   double tail_eps = kDefaultTailEps);

/// Forward balance recursion: pi_0 = 1-lambda/mu, pi_1 = pi_0(1-k_0)/k_0,
/// pi_{q+1} = (pi_q - pi_0 k_q - sum_{j=1..q} pi_j k_{q-j+1}) / k_0.
StationaryDist stationary_from_k(const KCoefficients& k, double lambda, double mu,
                                 std::int64_t q_max = kDefaultQMax);

// ---------------------------------------------------------------------------
// Capacity formulas
// ---------------------------------------------------------------------------

/// lambda * (log2|F| - sum_q pi_q H(psi_q)): decoder sees timestamps.
CapacityReport capacity(double lambda, const StationaryDist& pi, const NoiseModel& nm,
                        std::optional<CapacityReport::Method> method = std::nullopt);

/// lambda * (log2|F| - H(sum_q pi_q psi_q)): decoder lacks timestamps, so
/// the penalty is the entropy of the mixture law instead of the mixture of
/// entropies. Never exceeds the timestamped value.
CapacityReport capacity_no_timestamps(double lambda, const StationaryDist& pi,
                                      const NoiseModel& nm);

enum class BoundSide { Lower, Upper };

/// Closed-form capacity bounds for batch arrivals with batch size <= B and
/// two-level noise switching above queue length 1:
///   C = lambda*(log2|F| + (h2-h0)(1-lambda/mu)/k_0 - h2),  k_0 = E[m0^S].
/// Here m0 is the probability of an empty-arrival slot under the extremal
/// batch law: 1-lambda/B (lower, batches of B) or 1-lambda (upper,
/// single-job batches), with lambda = mean batch size per slot.
CapacityReport capacity_bound_type2(double lambda, double mu, const ParametricDist& p_S,
                                    std::int64_t B, const NoiseModel& nm, BoundSide which);

/// Same bound with m0 supplied directly, for callers using a different
/// arrival-rate convention. m0 must lie in (0,1).
CapacityReport capacity_bound_from_m0(double lambda, double mu, const ParametricDist& p_S,
                                      double m0, const NoiseModel& nm, BoundSide which);

// ---------------------------------------------------------------------------
// Extremal arrival constructions (exact mean 1/lambda)
// ---------------------------------------------------------------------------

/// Point mass at 1/lambda; 1/lambda must be an integer.
ParametricDist extremal_deterministic(double lambda);
/// Mass at {1, N} with N = max(2, ceil(1+(m-1)/eps0)) and epsilon re-solved
/// as (m-1)/(N-1) so the mean m = 1/lambda is hit exactly (eps <= eps0).
ParametricDist extremal_two_point(double lambda, double eps0);
ParametricDist extremal_geometric(double lambda);
/// I independent stages of rate I*lambda each; requires I*lambda < 1.
ParametricDist extremal_sum_of_geometric(double lambda, int stages);
/// Component i has rate I*lambda*c_i (so the mixture mean is exactly
/// 1/lambda); requires every weight positive and I*lambda*max(c) < 1.
ParametricDist extremal_mixture_of_geometric(double lambda, std::vector<double> weights);

// ---------------------------------------------------------------------------
// Ordering and invariance checks
// ---------------------------------------------------------------------------

struct OrderingEntry {
  std::string kind;
  double sigma = 0.0;
  double capacity = 0.0;
};

struct OrderingCheck {
  std::string description;
  double margin = 0.0;  // >= 0 when the predicted inequality holds
  bool holds = false;
};

/// Capacities of equal-mean inter-arrival laws under geometric service,
/// with the predicted orderings evaluated: deterministic >= sum-of-
/// geometric >= geometric >= two-point on capacities, and the generating-
/// function curve ordering (sum <= geometric <= mixture pointwise in x)
/// checked on a grid against an implicit equal-mean geometric.
struct OrderingTable {
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<OrderingEntry> entries;
  std::vector<OrderingCheck> capacity_checks;
  std::vector<OrderingCheck> gf_curve_checks;
  bool all_hold = false;
};

OrderingTable ordering_check(const std::vector<ParametricDist>& dists, double mu,
                             const NoiseModel& nm, std::int64_t q_max = kDefaultQMax);

struct InvarianceReport {
  std::vector<double> capacities;
  double max_abs_dev = 0.0;
  double allowed_dev = 0.0;
  bool all_equal = false;
};

/// With noise switching at queue length 0 (threshold 0), capacity depends
/// on the service law only through its mean; verifies all computed
/// capacities agree within 1e-8 plus propagated truncation bounds.
InvarianceReport invariance_check_service(double lambda,
                                          const std::vector<ParametricDist>& service_dists,
                                          const NoiseModel& nm,
                                          std::int64_t q_max = kDefaultQMax,
                                          std::int64_t j_max = kDefaultJMax,
                                          double tail_eps = kDefaultTailEps);

/// Batch-arrival analogue: equal-mean batch laws, fixed service law.
InvarianceReport invariance_check_batch(const std::vector<ParametricDist>& batch_dists,
                                        const ParametricDist& p_S, const NoiseModel& nm,
                                        std::int64_t q_max = kDefaultQMax,
                                        std::int64_t j_max = kDefaultJMax,
                                        double tail_eps = kDefaultTailEps);

}  // namespace queuechan
