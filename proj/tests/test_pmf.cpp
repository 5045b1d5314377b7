#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "queuechan/errors.hpp"
#include "queuechan/pmf.hpp"
#include "queuechan/rng.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace queuechan;
using testhelpers::points_of;

TEST_CASE("pmf canonicalization trims zeros and adjusts the offset") {
  Pmf p(2, {0.0, 0.0, 0.5, 0.5, 0.0, 0.0});
  CHECK(p.offset() == 4);
  CHECK(p.masses() == std::vector<double>{0.5, 0.5});
  CHECK(p.min_support() == 4);
  CHECK(p.max_support() == 5);
  CHECK(p.at(4) == 0.5);
  CHECK(p.at(3) == 0.0);
  CHECK(p.at(6) == 0.0);
}

TEST_CASE("pmf accepts an explicit tail bound and validates total mass") {
  Pmf p(0, {0.5, 0.3}, 0.2);
  CHECK(p.tail_bound() == 0.2);
  CHECK(p.sum() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(Pmf(0, {0.5, 0.3}, 0.1), DomainError);   // totals 0.9
  CHECK_THROWS_AS(Pmf(0, {0.5, 0.6}), DomainError);        // totals 1.1
  CHECK_THROWS_AS(Pmf(0, {0.5, -0.1, 0.6}), DomainError);  // negative mass
  CHECK_THROWS_AS(Pmf(-1, {1.0}), DomainError);            // negative support
}

TEST_CASE("pmf clamps roundoff-scale negative masses to zero") {
  Pmf p(0, {1.0 - 1e-13, 1e-13, -1e-14, 1e-14});
  for (double m : p.masses()) CHECK(m >= 0.0);
}

TEST_CASE("pmf moments of a hand-checked law") {
  // masses {0.2, 0.5, 0.3} at {1,2,3}: mean 2.1, second moment 4.9
  Pmf p(1, {0.2, 0.5, 0.3});
  CHECK(p.mean() == doctest::Approx(2.1).epsilon(1e-14));
  CHECK(p.second_moment() == doctest::Approx(4.9).epsilon(1e-14));
}

TEST_CASE("delta is a unit point mass") {
  Pmf d = Pmf::delta(5);
  CHECK(d.offset() == 5);
  CHECK(d.masses() == std::vector<double>{1.0});
}

TEST_CASE("convolution matches the hand-computed square of {0.7, 0.3}") {
  Pmf a(0, {0.7, 0.3});
  Pmf c = convolve(a, a);
  CHECK(c.offset() == 0);
  REQUIRE(c.masses().size() == 3);
  CHECK(c.masses()[0] == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(c.masses()[1] == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(c.masses()[2] == doctest::Approx(0.09).epsilon(1e-15));
}

TEST_CASE("convolution adds offsets and tail bounds") {
  Pmf a(2, {0.9, 0.0, 0.05}, 0.05);
  Pmf b(3, {0.8, 0.1}, 0.1);
  Pmf c = convolve(a, b);
  CHECK(c.offset() == 5);
  // missing mass is exactly 1 - 0.95*0.9
  CHECK(c.tail_bound() == doctest::Approx(0.145).epsilon(1e-12));
  CHECK(c.sum() + c.tail_bound() == doctest::Approx(1.0).epsilon(1e-12));
  Pmf d = convolve(Pmf::delta(2), Pmf::delta(3));
  CHECK(d.offset() == 5);
  CHECK(d.masses() == std::vector<double>{1.0});
}

TEST_CASE("total variation distance") {
  Pmf a(0, {0.5, 0.5});
  Pmf b(0, {0.25, 0.75});
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(tv_distance(a, b) == tv_distance(b, a));
  // disjoint supports are at distance 1
  CHECK(tv_distance(Pmf::delta(0), Pmf::delta(1)) == doctest::Approx(1.0));
  // unstored tails count as fully mismatched (distance is an upper bound)
  Pmf t(0, {0.9}, 0.1);
  CHECK(tv_distance(t, t) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("parametric validation rejects out-of-domain parameters") {
  CHECK_THROWS_AS(ParametricDist(Geometric{0.0}), DomainError);
  CHECK_THROWS_AS(ParametricDist(Geometric{1.0}), DomainError);
  CHECK_THROWS_AS(ParametricDist(Geometric{-0.2}), DomainError);
  CHECK_NOTHROW(ParametricDist(Geometric{0.999}));
  CHECK_THROWS_AS(ParametricDist(Deterministic{0}), DomainError);
  CHECK_NOTHROW(ParametricDist(Deterministic{1}));
  CHECK_THROWS_AS(ParametricDist(TwoPoint{0.0, 6}), DomainError);
  CHECK_THROWS_AS(ParametricDist(TwoPoint{1.0, 6}), DomainError);
  CHECK_THROWS_AS(ParametricDist(TwoPoint{0.2, 1}), DomainError);
  CHECK_THROWS_AS(ParametricDist(SumOfGeometric{{}}), DomainError);
  CHECK_THROWS_AS(ParametricDist(SumOfGeometric{{0.5, 1.0}}), DomainError);
  CHECK_THROWS_AS(ParametricDist(MixtureOfGeometric{{0.5, 0.4}, {0.5, 0.5}}), DomainError);
  CHECK_THROWS_AS(ParametricDist(MixtureOfGeometric{{0.5, 0.5}, {0.5}}), DomainError);
  CHECK_NOTHROW(ParametricDist(MixtureOfGeometric{{0.5, 0.5}, {0.4, 2.0 / 3.0}}));
}

TEST_CASE("closed-form moments per family") {
  // geometric on {1,2,...}: mean 1/r, E[T^2] = (2-r)/r^2
  MomentSummary g = moments(Geometric{0.5});
  CHECK(g.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.second_moment == doctest::Approx(6.0).epsilon(1e-14));

  MomentSummary d = moments(Deterministic{3});
  CHECK(d.mean == 3.0);
  CHECK(d.second_moment == 9.0);

  // (1-eps) at 1 plus eps at n: 0.8 + 0.2*6 = 2, 0.8 + 0.2*36 = 8
  MomentSummary tp = moments(TwoPoint{0.2, 6});
  CHECK(tp.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(tp.second_moment == doctest::Approx(8.0).epsilon(1e-14));

  // two independent rate-1/2 stages: mean 4, var 4, E[T^2] = 20
  MomentSummary s = moments(SumOfGeometric{{0.5, 0.5}});
  CHECK(s.mean == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s.second_moment == doctest::Approx(20.0).epsilon(1e-14));

  // 0.5 * Geo(0.4) + 0.5 * Geo(2/3): mean 0.5*2.5 + 0.5*1.5 = 2,
  // E[T^2] = 0.5*(2-0.4)/0.16 + 0.5*(2-2/3)/(4/9) = 5 + 1.5 = 6.5
  MomentSummary m = moments(MixtureOfGeometric{{0.5, 0.5}, {0.4, 2.0 / 3.0}});
  CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m.second_moment == doctest::Approx(6.5).epsilon(1e-14));

  MomentSummary e = moments(Explicit{Pmf(1, {0.2, 0.5, 0.3})});
  CHECK(e.mean == doctest::Approx(2.1).epsilon(1e-14));
}

TEST_CASE("rate conventions: gaps and services invert the mean, batches keep it") {
  CHECK(rate_from_interarrival(Geometric{0.25}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(rate_from_service(Deterministic{4}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(rate_from_batch(Explicit{Pmf(0, {0.7, 0.3})}) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("min_support per family") {
  CHECK(min_support(Geometric{0.5}) == 1);
  CHECK(min_support(Deterministic{7}) == 7);
  CHECK(min_support(TwoPoint{0.2, 6}) == 1);
  CHECK(min_support(SumOfGeometric{{0.5, 0.5, 0.5}}) == 3);
  CHECK(min_support(MixtureOfGeometric{{0.5, 0.5}, {0.4, 2.0 / 3.0}}) == 1);
  CHECK(min_support(Explicit{Pmf(4, {1.0})}) == 4);
}

TEST_CASE("mass_at matches hand values and the convolution oracle") {
  // geometric: r (1-r)^(t-1)
  CHECK(mass_at(Geometric{0.5}, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mass_at(Geometric{0.5}, 3) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(mass_at(Geometric{0.5}, 0) == 0.0);

  CHECK(mass_at(Deterministic{4}, 4) == 1.0);
  CHECK(mass_at(Deterministic{4}, 3) == 0.0);

  CHECK(mass_at(TwoPoint{0.2, 6}, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(mass_at(TwoPoint{0.2, 6}, 6) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(mass_at(TwoPoint{0.2, 6}, 3) == 0.0);

  // two rate-1/2 stages: P(T=t) = (t-1) 0.25 * 0.5^(t-2)
  SumOfGeometric sum{{0.5, 0.5}};
  CHECK(mass_at(sum, 2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mass_at(sum, 3) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mass_at(sum, 4) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(mass_at(sum, 1) == 0.0);

  // asymmetric stages: cross-check against dense convolution of truncations
  SumOfGeometric asym{{0.3, 0.7}};
  std::vector<double> a(60, 0.0), b(60, 0.0);
  for (int t = 1; t < 60; ++t) {
    a[static_cast<std::size_t>(t)] = 0.3 * std::pow(0.7, t - 1);
    b[static_cast<std::size_t>(t)] = 0.7 * std::pow(0.3, t - 1);
  }
  std::vector<double> conv = oracles::convolve_dense(a, b);
  for (std::int64_t t = 2; t <= 20; ++t)
    CHECK(mass_at(asym, t) ==
          doctest::Approx(conv[static_cast<std::size_t>(t)]).epsilon(1e-12));

  MixtureOfGeometric mix{{0.5, 0.5}, {0.4, 2.0 / 3.0}};
  CHECK(mass_at(mix, 2) ==
        doctest::Approx(0.5 * 0.4 * 0.6 + 0.5 * (2.0 / 3.0) * (1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("materialize truncates the geometric tail at the certified bound") {
  Pmf p = materialize(Geometric{0.5}, 1e-9);
  CHECK(p.offset() == 1);
  // P(T > 30) = 2^-30 ~ 9.3e-10 is the first tail under 1e-9
  CHECK(p.masses().size() == 30);
  CHECK(p.tail_bound() == doctest::Approx(std::pow(2.0, -30)).epsilon(1e-12));
  CHECK(p.tail_bound() <= 1e-9);
  for (std::int64_t t = 1; t <= 30; ++t)
    CHECK(p.at(t) == doctest::Approx(mass_at(Geometric{0.5}, t)).epsilon(1e-14));
  CHECK(p.sum() + p.tail_bound() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("materialize is exact for finite families") {
  Pmf d = materialize(Deterministic{3}, 1e-12);
  CHECK(d.offset() == 3);
  CHECK(d.masses() == std::vector<double>{1.0});
  CHECK(d.tail_bound() == 0.0);

  Pmf tp = materialize(TwoPoint{0.2, 6}, 1e-12);
  CHECK(tp.at(1) == doctest::Approx(0.8));
  CHECK(tp.at(6) == doctest::Approx(0.2));
  CHECK(tp.tail_bound() == 0.0);

  Pmf e = materialize(Explicit{Pmf(1, {0.2, 0.5, 0.3})}, 1e-12);
  CHECK(e.at(2) == 0.5);
}

TEST_CASE("materialize covers compound families pointwise") {
  for (double eps : {1e-8, 1e-12}) {
    for (ParametricDist d :
         {ParametricDist(SumOfGeometric{{0.3, 0.7}}),
          ParametricDist(MixtureOfGeometric{{0.25, 0.75}, {0.2, 0.8}})}) {
      Pmf p = materialize(d, eps);
      CHECK(p.tail_bound() <= eps);
      CHECK(p.sum() + p.tail_bound() == doctest::Approx(1.0).epsilon(1e-9));
      // truncated-stage convolution may fall short of the exact mass by up
      // to the truncation budget, never more
      for (std::int64_t t = p.min_support(); t <= std::min<std::int64_t>(p.max_support(), 40);
           ++t) {
        CHECK(p.at(t) <= mass_at(d, t) + 1e-15);
        CHECK(std::abs(p.at(t) - mass_at(d, t)) <= eps);
      }
    }
  }
}

TEST_CASE("generating function closed forms match direct summation") {
  // deterministic: x^t
  CHECK(gf_eval(Deterministic{2}, 0.7) == doctest::Approx(0.49).epsilon(1e-15));
  // geometric factor x r / (1 - x(1-r)): Geo(1/2) at 1/2 gives 1/3
  CHECK(gf_eval(Geometric{0.5}, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  std::vector<ParametricDist> dists = {
      Geometric{0.35},      Deterministic{4},
      TwoPoint{0.2, 6},     SumOfGeometric{{0.3, 0.7}},
      MixtureOfGeometric{{0.25, 0.75}, {0.2, 0.8}},
      Explicit{Pmf(1, {0.2, 0.5, 0.3})}};
  for (const auto& d : dists) {
    oracles::Points pts = points_of(d, 1e-15);
    for (double x : {0.1, 0.5, 0.9, 0.99}) {
      double direct = oracles::gf_direct(pts, x);
      CHECK(gf_eval(d, x) == doctest::Approx(direct).epsilon(1e-10));
    }
    // the limit toward 1 recovers total mass
    CHECK(gf_eval(d, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("generating function rejects arguments outside (0, 1)") {
  CHECK_THROWS_AS(gf_eval(Geometric{0.5}, 0.0), DomainError);
  CHECK_THROWS_AS(gf_eval(Geometric{0.5}, -0.5), DomainError);
  CHECK_THROWS_AS(gf_eval(Geometric{0.5}, 1.0), DomainError);
  CHECK_THROWS_AS(gf_eval(Geometric{0.5}, 1.5), DomainError);
}

TEST_CASE("sampler reproduces identical draws from identical streams") {
  DistSampler s(Geometric{0.3});
  RngStream r1(99, StreamPurpose::Generic), r2(99, StreamPurpose::Generic);
  for (int i = 0; i < 100; ++i) CHECK(s.sample(r1) == s.sample(r2));
  RngStream r3(100, StreamPurpose::Generic);
  bool all_same = true;
  RngStream r4(99, StreamPurpose::Generic);
  for (int i = 0; i < 100; ++i) all_same = all_same && s.sample(r3) == s.sample(r4);
  CHECK_FALSE(all_same);
}

TEST_CASE("sampler respects each family's support") {
  RngStream rng(7, StreamPurpose::Generic);
  DistSampler det(Deterministic{4});
  for (int i = 0; i < 10; ++i) CHECK(det.sample(rng) == 4);

  DistSampler tp(TwoPoint{0.2, 6});
  for (int i = 0; i < 200; ++i) {
    std::int64_t v = tp.sample(rng);
    CHECK((v == 1 || v == 6));
  }

  DistSampler sum(SumOfGeometric{{0.5, 0.5}});
  for (int i = 0; i < 200; ++i) CHECK(sum.sample(rng) >= 2);

  DistSampler geo(Geometric{0.5});
  for (int i = 0; i < 200; ++i) CHECK(geo.sample(rng) >= 1);
}

TEST_CASE("sampler long-run frequencies match the law") {
  const int N = 200000;
  RngStream rng(12345, StreamPurpose::Generic);

  DistSampler geo(Geometric{0.5});
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += static_cast<double>(geo.sample(rng));
  // mean 2, sd sqrt(2); a 5-sigma band on the sample mean
  CHECK(sum / N == doctest::Approx(2.0).epsilon(5.0 * std::sqrt(2.0 / N) / 2.0));

  DistSampler ex(Explicit{Pmf(1, {0.2, 0.5, 0.3})});
  std::vector<double> freq(4, 0.0);
  for (int i = 0; i < N; ++i) freq[static_cast<std::size_t>(ex.sample(rng))] += 1.0 / N;
  CHECK(freq[1] == doctest::Approx(0.2).epsilon(0.05));
  CHECK(freq[2] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(freq[3] == doctest::Approx(0.3).epsilon(0.05));

  DistSampler mix(MixtureOfGeometric{{0.5, 0.5}, {0.4, 2.0 / 3.0}});
  double msum = 0.0;
  for (int i = 0; i < N; ++i) msum += static_cast<double>(mix.sample(rng));
  CHECK(msum / N == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("kind tags match the serialized names") {
  CHECK(ParametricDist(Geometric{0.5}).kind() == "geometric");
  CHECK(ParametricDist(Deterministic{2}).kind() == "deterministic");
  CHECK(ParametricDist(TwoPoint{0.2, 6}).kind() == "two_point");
  CHECK(ParametricDist(SumOfGeometric{{0.5, 0.5}}).kind() == "sum_of_geometric");
  CHECK(ParametricDist(MixtureOfGeometric{{0.5, 0.5}, {0.4, 0.5}}).kind() ==
        "mixture_of_geometric");
  CHECK(ParametricDist(Explicit{Pmf(0, {1.0})}).kind() == "explicit");
}
