// Acceptance harness: each criterion prints exactly one [PASS]/[FAIL] line
// with its measured margins. Run with no arguments for all ten, or pass
// criterion numbers to run a subset. Exit status is nonzero if any ran red.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "queuechan/capacity.hpp"
#include "queuechan/coding.hpp"
#include "queuechan/errors.hpp"
#include "queuechan/noise.hpp"
#include "queuechan/pipeline.hpp"
#include "queuechan/pmf.hpp"
#include "queuechan/sim.hpp"
#include "support/oracles.hpp"

using namespace queuechan;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

NoiseModel flip_model(std::int64_t b, double p_low, double p_high) {
  return NoiseModel(Alphabet{2},
                    ThresholdedNoise{b, binary_flip(p_low), binary_flip(p_high)});
}

// the binary channel used throughout: flip 0.1 on an empty queue, 0.4 otherwise
NoiseModel reference_noise() { return flip_model(0, 0.1, 0.4); }

SimConfig reference_channel(std::int64_t horizon, std::int64_t warmup, std::uint64_t seed) {
  return SimConfig{ArrivalMode::InterarrivalTimes,
                   Geometric{0.3},
                   Geometric{0.6},
                   reference_noise(),
                   horizon,
                   warmup,
                   seed,
                   false};
}

double capacity_at(double lambda, double mu, const NoiseModel& nm) {
  return capacity(lambda, stationary_g_geo1(Geometric{lambda}, mu, 400), nm)
      .capacity_bits_per_slot;
}

// TV between an empirical pmf and a truncated analytic law; the analytic
// tail bound counts fully against the distance.
double tv_against(const Pmf& emp, const StationaryDist& pi) {
  std::int64_t top = std::max<std::int64_t>(
      emp.offset() + static_cast<std::int64_t>(emp.masses().size()),
      static_cast<std::int64_t>(pi.masses.size()));
  double acc = 0.0;
  for (std::int64_t q = 0; q < top; ++q) acc += std::abs(emp.at(q) - pi.at(q));
  return 0.5 * (acc + pi.tail_bound);
}

// --- criterion 1: fixed-point solver vs closed form ------------------------

Outcome criterion1() {
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  int points = 0;
  for (double mu : {0.6, 0.8, 0.95}) {
    for (int i = 1; i <= 11; ++i) {
      double lambda = 0.05 * i;
      double solved = solve_sigma(Geometric{lambda}, mu);
      double closed = sigma_closed_form_geo(lambda, mu);
      worst = std::max(worst, std::abs(solved - closed));
      ++points;
    }
  }
  Outcome o;
  o.pass = worst < kTol;
  o.detail = "bisection sigma vs closed form on " + std::to_string(points) +
             " (lambda, mu) points: max |diff| = " + fmt(worst) + " (require < 1e-10)";
  return o;
}

// --- criterion 2: capacity curve shape and spot value ----------------------

Outcome criterion2() {
  constexpr double kSpotTol = 1e-4;
  const NoiseModel nm = reference_noise();
  bool shapes_ok = true;
  std::string shape_msg;

  for (double mu : {0.6, 0.8}) {
    std::vector<double> lambdas, caps;
    for (double l = 0.02; l < mu - 0.019; l += 0.02) {
      lambdas.push_back(l);
      caps.push_back(capacity_at(l, mu, nm));
    }
    std::size_t k = static_cast<std::size_t>(
        std::max_element(caps.begin(), caps.end()) - caps.begin());
    bool interior = k > 0 && k + 1 < caps.size();
    bool unimodal = true;
    for (std::size_t i = 0; i + 1 < caps.size(); ++i) {
      if (i < k && !(caps[i] < caps[i + 1])) unimodal = false;
      if (i >= k && !(caps[i] > caps[i + 1])) unimodal = false;
    }
    bool vanishes = capacity_at(0.01, mu, nm) < 0.02;
    if (!(interior && unimodal && vanishes)) {
      shapes_ok = false;
      shape_msg += " mu=" + fmt(mu) + " shape violated;";
    }
  }

  bool dominance = true;
  for (double l = 0.05; l <= 0.551; l += 0.05)
    dominance = dominance && capacity_at(l, 0.8, nm) > capacity_at(l, 0.6, nm);

  double spot = capacity_at(0.3, 0.6, nm);
  double spot_err = std::abs(spot - 0.116280);

  Outcome o;
  o.pass = shapes_ok && dominance && spot_err < kSpotTol;
  o.detail = "capacity rises to a unique interior peak and vanishes at small lambda "
             "(mu in {0.6, 0.8}), faster service dominates, value at (0.3, 0.6) = " +
             fmt(spot) + " vs 0.116280 (|diff| = " + fmt(spot_err) + ", require < 1e-4)";
  if (!shapes_ok) o.detail += ";" + shape_msg;
  if (!dominance) o.detail += "; mu=0.8 curve does not dominate mu=0.6";
  return o;
}

// --- criterion 3: simulation adjudicates the two stationary laws -----------

Outcome criterion3() {
  constexpr double kTvMatch = 0.01;
  SimConfig cfg = reference_channel(1000000, 100000, 2024);
  SimulationTrace trace = simulate(cfg);
  Pmf emp = empirical_pi(trace, cfg.resolved_warmup());

  StationaryDist geo_form = stationary_g_geo1(Geometric{0.3}, 0.6, 200);
  KCoefficients k = k_coefficients_geo_g1(0.3, Geometric{0.6}, 250, 1e-12);
  StationaryDist recursive = stationary_from_k(k, 0.3, 0.6, 200);

  double tv_geo = tv_against(emp, geo_form);
  double tv_rec = tv_against(emp, recursive);

  std::string verdict;
  bool any = false;
  if (tv_geo < kTvMatch) {
    verdict = "the geometric-ratio law (pi_0 = 5/7) matches";
    any = true;
  }
  if (tv_rec < kTvMatch) {
    verdict += std::string(any ? " and " : "") + "the balance-recursion law (pi_0 = 1/2) matches";
    any = true;
  }
  if (!any) verdict = "neither candidate law matches";

  Outcome o;
  o.pass = any;
  o.detail = "10^6-departure run at (0.3, 0.6): TV vs geometric-ratio law = " + fmt(tv_geo) +
             ", TV vs balance-recursion law = " + fmt(tv_rec) + "; " + verdict +
             " (require TV < 0.01 for at least one)";
  return o;
}

// --- criterion 4: balance recursion vs frozen digits and power iteration ---

Outcome criterion4() {
  constexpr double kDigitTol = 1e-9;
  constexpr double kTvTol = 1e-8;
  KCoefficients k = k_coefficients_geo_g1(0.3, Deterministic{2}, 200, 1e-12);
  StationaryDist pi = stationary_from_k(k, 0.3, 0.5, 60);

  double d0 = std::abs(pi.at(0) - 0.4);
  double d1 = std::abs(pi.at(1) - 0.4163265306122449);
  double d2 = std::abs(pi.at(2) - 0.1499375260308204);
  double digit_err = std::max({d0, d1, d2});

  std::vector<double> ref = oracles::power_iteration_pi(k.k, 400);
  double acc = 0.0;
  for (std::int64_t q = 0; q <= 60; ++q)
    acc += std::abs(pi.at(q) - ref[static_cast<std::size_t>(q)]);
  double tv = 0.5 * acc;

  Outcome o;
  o.pass = digit_err < kDigitTol && tv < kTvTol;
  o.detail = "recursion for unit-rate-0.3 arrivals with 2-slot service: max digit error vs "
             "(0.4, 0.416327, 0.149938) = " + fmt(digit_err) +
             " (require < 1e-9), TV vs power iteration = " + fmt(tv) + " (require < 1e-8)";
  return o;
}

// --- criterion 5: capacity ordering across arrival constructions -----------

Outcome criterion5() {
  constexpr double kGap = 1e-6;
  const NoiseModel nm = flip_model(1, 0.1, 0.4);
  std::ostringstream msg;
  bool ok = true;

  // lambda = 0.4: the deterministic law (mean 2.5 not an integer) and the
  // 3-stage sum (stage rate 1.2 >= 1) do not exist, so the chain is checked
  // on the constructions that do, and the full chain is re-checked at
  // lambda = 0.25 below where every construction is defined.
  {
    std::vector<ParametricDist> dists = {
        extremal_sum_of_geometric(0.4, 2), extremal_geometric(0.4),
        extremal_two_point(0.4, 0.01), extremal_mixture_of_geometric(0.4, {0.4, 0.6})};
    OrderingTable t = ordering_check(dists, 0.7, nm, 400);
    double g1 = t.entries[0].capacity - t.entries[1].capacity;  // sum2 over geo
    double g2 = t.entries[1].capacity - t.entries[2].capacity;  // geo over two-point
    bool sub = t.all_hold && g1 > kGap && g2 > kGap;
    ok = ok && sub;
    msg << "lambda=0.4: gaps sum2-geo = " << fmt(g1) << ", geo-twopoint = " << fmt(g2)
        << (sub ? "" : " [violated]");
  }
  {
    std::vector<ParametricDist> dists = {
        extremal_deterministic(0.25),        extremal_sum_of_geometric(0.25, 3),
        extremal_sum_of_geometric(0.25, 2),  extremal_geometric(0.25),
        extremal_two_point(0.25, 0.01),      extremal_mixture_of_geometric(0.25, {0.3, 0.7})};
    OrderingTable t = ordering_check(dists, 0.7, nm, 400);
    double min_gap = 1e300;
    for (int i = 0; i < 4; ++i)
      min_gap = std::min(min_gap, t.entries[static_cast<std::size_t>(i)].capacity -
                                      t.entries[static_cast<std::size_t>(i + 1)].capacity);
    bool curves = true;
    for (const auto& c : t.gf_curve_checks) curves = curves && c.holds;
    bool sub = t.all_hold && curves && min_gap > kGap;
    ok = ok && sub;
    msg << "; lambda=0.25 full chain det>sum3>sum2>geo>twopoint: min gap = " << fmt(min_gap)
        << ", generating-function curve ordering " << (curves ? "holds" : "violated")
        << (sub ? "" : " [violated]");
  }

  Outcome o;
  o.pass = ok;
  o.detail = msg.str() + " (require gaps > 1e-6)";
  return o;
}

// --- criterion 6: capacity depends on service/batch law only via its mean --

Outcome criterion6() {
  const NoiseModel nm = reference_noise();
  std::vector<ParametricDist> services = {
      Deterministic{2}, Geometric{0.5}, TwoPoint{0.2, 6},
      Explicit{Pmf(1, {0.5, 0.0, 0.5})},
      MixtureOfGeometric{{0.5, 0.5}, {0.4, 2.0 / 3.0}}};
  InvarianceReport service_rep = invariance_check_service(0.3, services, nm, 400, 400, 1e-11);

  std::vector<ParametricDist> batches = {
      Explicit{Pmf(0, {0.7, 0.3})},
      Explicit{Pmf(0, {0.8, 0.1, 0.1})},
      Explicit{Pmf(0, {0.85, 0.1, 0.0, 0.0, 0.05})},
      Explicit{Pmf(0, {0.75, 0.2, 0.05})},
      Explicit{Pmf(0, {0.77, 0.18, 0.03, 0.02})}};
  InvarianceReport batch_rep =
      invariance_check_batch(batches, Deterministic{2}, nm, 400, 400, 1e-11);

  Outcome o;
  o.pass = service_rep.all_equal && batch_rep.all_equal;
  o.detail = "five mean-2 service laws at arrival rate 0.3: spread = " +
             fmt(service_rep.max_abs_dev) + " (allowed " + fmt(service_rep.allowed_dev) +
             "); five mean-0.3 batch laws with 2-slot service: spread = " +
             fmt(batch_rep.max_abs_dev) + " (allowed " + fmt(batch_rep.allowed_dev) + ")";
  return o;
}

// --- criterion 7: empirical information density concentrates ---------------

Outcome criterion7() {
  SimConfig cfg = reference_channel(110000, 10000, 1001);
  SimulationTrace trace = simulate(cfg);
  EmpiricalSummary est = info_density_estimate(trace, cfg.noise, cfg.resolved_warmup());

  CapacityReport rep = capacity(0.3, stationary_g_geo1(Geometric{0.3}, 0.6, 400),
                                reference_noise());
  double analytic = rep.log_alphabet - rep.noise_penalty;
  double z = (est.info_density_mean - analytic) / est.info_density_stderr;

  Outcome o;
  o.pass = est.jobs_used >= 100000 && std::abs(z) <= 3.0;
  o.detail = "mean per-arrival information density over " + std::to_string(est.jobs_used) +
             " jobs = " + fmt(est.info_density_mean) + " vs analytic " + fmt(analytic) +
             ", z = " + fmt(z) + " (require |z| <= 3)";
  return o;
}

// --- criterion 8: random-coding crossover and decoder comparison -----------

Outcome criterion8() {
  SimConfig cfg = reference_channel(1, -1, 4242);

  Codebook low_rate = Codebook::random(64, 256, 2, 91);
  ExperimentResult low = run_experiment(low_rate, cfg, DecoderKind::WithTimestamps, 500);

  Codebook high_rate = Codebook::random(16, std::int64_t{1} << 15, 2, 92);
  ExperimentResult high = run_experiment(high_rate, cfg, DecoderKind::WithTimestamps, 500);

  SimConfig pcfg = cfg;
  pcfg.seed = 4243;
  PairedExperiment paired = run_paired(Codebook::random(32, 256, 2, 93), pcfg, 200);
  double slack = paired.error_gap_mean + 2.0 * paired.error_gap_stderr;

  Outcome o;
  o.pass = low.block_error_rate < 0.05 && high.block_error_rate > 0.5 && slack >= 0.0;
  o.detail = "block error rate at 0.125 bits/symbol (n=64, 256 messages) = " +
             fmt(low.block_error_rate) + " (require < 0.05), at 0.9375 bits/symbol "
             "(n=16, 32768 messages) = " + fmt(high.block_error_rate) +
             " (require > 0.5); paired gap without-minus-with = " + fmt(paired.error_gap_mean) +
             " +- " + fmt(paired.error_gap_stderr) + " (require >= -2 stderr)";
  return o;
}

// --- criterion 9: dropping timestamps never helps --------------------------

Outcome criterion9() {
  constexpr double kEqTol = 1e-12;
  std::mt19937_64 rng(515151);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  int checked = 0, constant_checked = 0;
  double worst_violation = -1e300;  // no-timestamp capacity minus capacity
  double worst_equality = 0.0;

  for (int i = 0; i < 20; ++i) {
    double lambda = 0.05 + 0.38 * uni(rng);
    bool constant = i % 4 == 0;
    double p_low = 0.02 + 0.44 * uni(rng);
    double p_high = constant ? p_low : 0.02 + 0.44 * uni(rng);
    std::int64_t b = static_cast<std::int64_t>(3.0 * uni(rng));
    NoiseModel nm = flip_model(b, p_low, p_high);

    StationaryDist pi = [&] {
      switch (i % 3) {
        case 0: {
          double mu = lambda + 0.07 + (0.93 - lambda - 0.07) * uni(rng);
          return stationary_g_geo1(Geometric{lambda}, mu, 400);
        }
        case 1:
          return stationary_from_k(k_coefficients_geo_g1(lambda, Deterministic{2}, 300, 1e-12),
                                   lambda, 0.5, 300);
        default:
          return stationary_from_k(
              k_coefficients_type2(Explicit{Pmf(0, {1.0 - lambda, lambda})}, Deterministic{2},
                                   300, 1e-12),
              lambda, 0.5, 300);
      }
    }();

    double with_ts = capacity(lambda, pi, nm).capacity_bits_per_slot;
    double without_ts = capacity_no_timestamps(lambda, pi, nm).capacity_bits_per_slot;
    worst_violation = std::max(worst_violation, without_ts - with_ts);
    ++checked;
    if (constant) {
      worst_equality = std::max(worst_equality, std::abs(without_ts - with_ts));
      ++constant_checked;
    }
  }

  Outcome o;
  o.pass = worst_violation <= kEqTol && worst_equality <= kEqTol;
  o.detail = std::to_string(checked) + " randomized systems: max (no-timestamp minus "
             "timestamped) capacity = " + fmt(worst_violation) + " (require <= 1e-12); " +
             std::to_string(constant_checked) + " had queue-independent noise, max |difference| = " +
             fmt(worst_equality) + " (require <= 1e-12)";
  return o;
}

// --- criterion 10: closed-form batch bounds bracket the exact value --------

Outcome criterion10() {
  constexpr double kEqTol = 1e-9;
  const double lambda = 0.4, mu = 0.5;
  const ParametricDist service = Deterministic{2};
  const NoiseModel nm = flip_model(1, 0.1, 0.4);

  auto batch_capacity = [&](const ParametricDist& m_A) {
    KCoefficients k = k_coefficients_type2(m_A, service, 300, 1e-12);
    StationaryDist pi = stationary_from_k(k, lambda, mu, 300);
    return capacity(lambda, pi, nm).capacity_bits_per_slot;
  };

  double upper = capacity_bound_type2(lambda, mu, service, 4, nm, BoundSide::Upper)
                     .capacity_bits_per_slot;
  double lower = capacity_bound_type2(lambda, mu, service, 4, nm, BoundSide::Lower)
                     .capacity_bits_per_slot;
  double bernoulli = batch_capacity(Explicit{Pmf(0, {1.0 - lambda, lambda})});
  double bernoulli_gap = std::abs(bernoulli - upper);

  std::mt19937_64 rng(606060);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  double worst_low = 1e300, worst_high = -1e300;
  int laws = 0;
  for (int i = 0; i < 10; ++i) {
    double q1 = uni(rng), q2 = uni(rng), q3 = uni(rng), q4 = uni(rng);
    double mean = q1 + 2 * q2 + 3 * q3 + 4 * q4;
    double s = lambda / mean;  // rescale to mean batch size 0.4
    q1 *= s; q2 *= s; q3 *= s; q4 *= s;
    Pmf m_A(0, {1.0 - q1 - q2 - q3 - q4, q1, q2, q3, q4});
    double c = batch_capacity(Explicit{m_A});
    worst_low = std::min(worst_low, c - lower);
    worst_high = std::max(worst_high, c - upper);
    ++laws;
  }

  Outcome o;
  o.pass = bernoulli_gap <= kEqTol && worst_low >= -kEqTol && worst_high <= kEqTol;
  o.detail = "single-arrival batches: |exact - upper bound| = " + fmt(bernoulli_gap) +
             " (require <= 1e-9); " + std::to_string(laws) +
             " random mean-0.4 batch laws with support <= 4: min (exact - lower) = " +
             fmt(worst_low) + ", max (exact - upper) = " + fmt(worst_high) +
             " (bounds must bracket within 1e-9)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  using Fn = Outcome (*)();
  Fn criteria[10] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                     criterion6, criterion7, criterion8, criterion9, criterion10};

  std::vector<int> which;
  for (int a = 1; a < argc; ++a) {
    int n = std::atoi(argv[a]);
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: %s [criterion numbers in 1..10]\n", argv[0]);
      return 2;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (int n = 1; n <= 10; ++n) which.push_back(n);

  bool all_pass = true;
  for (int n : which) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("unexpected exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", n,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
