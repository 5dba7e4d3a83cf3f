#include <algorithm>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "concord/measures.hpp"
#include "concord/types.hpp"
#include "testutil.hpp"

using namespace concord;
using Catch::Matchers::WithinAbs;

TEST_CASE("weight vectors enforce their invariants") {
  CHECK_NOTHROW(WeightVector({0.25, 0.5, 0.25}));
  CHECK_THROWS_AS(WeightVector({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(WeightVector({1.2, -0.2}), ValidationError);
  CHECK_THROWS_AS(WeightVector({}), ValidationError);

  const WeightVector w = WeightVector::normalized_from({1, 4, 3, 5, 2});
  CHECK_THAT(w[0], WithinAbs(1.0 / 15, 1e-15));
  CHECK_THAT(w[3], WithinAbs(5.0 / 15, 1e-15));
  CHECK_THROWS_AS(WeightVector::normalized_from({0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(WeightVector::normalized_from({1.0, -1.0}), ValidationError);

  CHECK(WeightVector::uniform(4).is_uniform());
  CHECK_FALSE(WeightVector({0.3, 0.7}).is_uniform());
}

TEST_CASE("opinion vectors reject out-of-scale entries") {
  CHECK_NOTHROW(OpinionVector({0.0, 1.0, 0.5}));
  CHECK_THROWS_AS(OpinionVector({1.2}), ValidationError);
  CHECK_THROWS_AS(OpinionVector({-0.01}), ValidationError);
  CHECK_THROWS_AS(OpinionVector({}), ValidationError);
}

TEST_CASE("owa aggregates the decreasingly sorted input") {
  const WeightVector omega({0.25, 0.5, 0.25});
  CHECK_THAT(owa(omega, OpinionVector({1.0, 0.5, 0.0})), WithinAbs(0.5, 1e-15));
  CHECK_THAT(owa(omega, OpinionVector({1.0, 0.25, 0.25})), WithinAbs(0.4375, 1e-15));

  const WeightVector head({1.0, 0.0, 0.0, 0.0});
  CHECK_THAT(owa(head, OpinionVector({0.1, 0.9, 0.4, 0.3})), WithinAbs(0.9, 1e-15));

  CHECK_THROWS_AS(owa(omega, OpinionVector({0.5, 0.5})), DimensionError);
}

TEST_CASE("owa is symmetric and indifferent to tie order") {
  testutil::Rng rng(991);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    const WeightVector omega = testutil::random_weights(rng, n);
    std::vector<double> vals = testutil::random_unit_values(rng, n);
    if (rep % 3 == 0 && n >= 3) vals[1] = vals[0];  // inject duplicates
    const double base = owa(omega, OpinionVector(vals));
    std::vector<double> shuffled = vals;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(owa(omega, OpinionVector(shuffled)) == base);
  }
}

TEST_CASE("kappa_mutual is the largest pairwise disparity") {
  CHECK_THAT(kappa_mutual(OpinionVector({0.05, 0.1, 0.25, 0.3, 0.6})), WithinAbs(0.55, 1e-15));
  CHECK(kappa_mutual(OpinionVector({0.4, 0.4, 0.4})) == 0.0);
  CHECK(kappa_mutual(OpinionVector({0.7})) == 0.0);
  CHECK_THAT(kappa_mutual(OpinionVector({0.1, 0.1, 0.25, 0.3, 0.43333})),
             WithinAbs(0.33333, 1e-12));
}

TEST_CASE("kappa_max_dev measures the worst deviation from the aggregate") {
  const AggregatorSpec phi =
      AggregatorSpec::owa(WeightVector({0.375, 0.1875, 0.25, 0.0625, 0.125}));
  const OpinionVector x({0.1, 0.1, 0.25, 0.3, 0.43333});
  CHECK_THAT(aggregate(phi, x), WithinAbs(0.3, 1e-4));
  CHECK_THAT(kappa_max_dev(x, phi), WithinAbs(0.2, 1e-4));

  CHECK(kappa_max_dev(OpinionVector({0.3, 0.3, 0.3}), AggregatorSpec::arithmetic_mean()) == 0.0);

  const AggregatorSpec phi3 = AggregatorSpec::owa(WeightVector({0.25, 0.5, 0.25}));
  CHECK_THAT(kappa_max_dev(OpinionVector({1.0, 0.25, 0.25}), phi3), WithinAbs(0.5625, 1e-15));
}

TEST_CASE("kappa_weighted_dev averages deviations by importance") {
  const AggregatorSpec mean = AggregatorSpec::arithmetic_mean();
  CHECK(kappa_weighted_dev(OpinionVector({0.2, 0.2}), WeightVector::uniform(2), mean) == 0.0);
  CHECK_THAT(kappa_weighted_dev(OpinionVector({1.0, 0.0, 0.0}), WeightVector::uniform(3), mean),
             WithinAbs(4.0 / 9.0, 1e-15));

  testutil::Rng rng(5217);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    const OpinionVector x = testutil::random_opinions(rng, n);
    const WeightVector w = testutil::random_weights(rng, n);
    const AggregatorSpec phi = AggregatorSpec::owa(testutil::random_weights(rng, n));
    CHECK(kappa_weighted_dev(x, w, phi) <= kappa_max_dev(x, phi) + 1e-12);
  }
}

TEST_CASE("kappa_pairwise follows the weighted pair formula") {
  CHECK(kappa_pairwise(OpinionVector({0.5, 0.5, 0.5}), WeightVector::uniform(3)) == 0.0);
  CHECK_THAT(kappa_pairwise(OpinionVector({1.0, 0.0}), WeightVector({0.5, 0.5})),
             WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(kappa_pairwise(OpinionVector({0.5}), WeightVector({1.0})), ValidationError);
}

TEST_CASE("mutual consensus bounds every aggregate deviation measure") {
  testutil::Rng rng(40917);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    const OpinionVector x = testutil::random_opinions(rng, n);
    const WeightVector w = testutil::random_weights(rng, n);
    AggregatorSpec phi = AggregatorSpec::arithmetic_mean();
    switch (rep % 3) {
      case 1:
        phi = AggregatorSpec::weighted_mean(testutil::random_weights(rng, n));
        break;
      case 2:
        phi = AggregatorSpec::owa(testutil::random_weights(rng, n));
        break;
      default:
        break;
    }
    const double alpha = kappa_mutual(x);
    CHECK(kappa_max_dev(x, phi) <= alpha + 1e-12);
    CHECK(kappa_weighted_dev(x, w, phi) <= alpha + 1e-12);
    CHECK(kappa_pairwise(x, w) <= alpha + 1e-12);
  }
}

TEST_CASE("every aggregator kind is averaging") {
  testutil::Rng rng(777);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const OpinionVector x = testutil::random_opinions(rng, n);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (const AggregatorSpec& phi :
         {AggregatorSpec::arithmetic_mean(),
          AggregatorSpec::weighted_mean(testutil::random_weights(rng, n)),
          AggregatorSpec::owa(testutil::random_weights(rng, n))}) {
      const double g = aggregate(phi, x);
      CHECK(g >= *lo - 1e-12);
      CHECK(g <= *hi + 1e-12);
    }
  }
}

TEST_CASE("all measures are shift-invariant and the symmetric ones permutation-invariant") {
  testutil::Rng rng(31337);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    const OpinionVector x = testutil::random_opinions(rng, n);
    const WeightVector omega = testutil::random_weights(rng, n);
    const WeightVector w = testutil::random_weights(rng, n);
    const AggregatorSpec phi = AggregatorSpec::owa(omega);

    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double lam = testutil::uniform(rng, -*lo, 1.0 - *hi);
    std::vector<double> shifted(x.begin(), x.end());
    for (auto& v : shifted) v += lam;
    const OpinionVector xs(shifted);

    CHECK_THAT(kappa_mutual(xs), WithinAbs(kappa_mutual(x), 1e-12));
    CHECK_THAT(kappa_max_dev(xs, phi), WithinAbs(kappa_max_dev(x, phi), 1e-12));
    CHECK_THAT(kappa_weighted_dev(xs, w, phi), WithinAbs(kappa_weighted_dev(x, w, phi), 1e-12));
    CHECK_THAT(kappa_pairwise(xs, w), WithinAbs(kappa_pairwise(x, w), 1e-12));

    std::vector<double> perm(x.begin(), x.end());
    std::shuffle(perm.begin(), perm.end(), rng);
    const OpinionVector xp(perm);
    CHECK_THAT(kappa_mutual(xp), WithinAbs(kappa_mutual(x), 1e-12));
    CHECK_THAT(kappa_max_dev(xp, phi), WithinAbs(kappa_max_dev(x, phi), 1e-12));
    // the weighted measures are symmetric only under uniform importance
    const WeightVector wu = WeightVector::uniform(n);
    CHECK_THAT(kappa_weighted_dev(xp, wu, phi), WithinAbs(kappa_weighted_dev(x, wu, phi), 1e-12));
    CHECK_THAT(kappa_pairwise(xp, wu), WithinAbs(kappa_pairwise(x, wu), 1e-12));
  }
}

TEST_CASE("owa max deviation agrees with its sorted-form evaluation") {
  testutil::Rng rng(2024);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rng() % 8;
    const OpinionVector x = testutil::random_opinions(rng, n);
    const WeightVector omega = testutil::random_weights(rng, n);
    const double direct = kappa_max_dev(x, AggregatorSpec::owa(omega));
    const double sorted_form = testutil::kappa_owa_sorted_form(omega, x);
    CHECK_THAT(direct, WithinAbs(sorted_form, 1e-12));
  }
}

TEST_CASE("membership reports the regions named by the instance thresholds") {
  const WeightVector omega({0.25, 0.5, 0.25});
  const Instance inst(OpinionVector({0.5, 0.5, 0.5}), WeightVector::uniform(3), omega,
                      std::nullopt, 0.5, 0.9);

  auto r1 = membership(OpinionVector({1.0, 0.5, 0.0}), inst);
  CHECK(r1.owa);                    // on the boundary, inclusive
  REQUIRE(r1.mutual.has_value());
  CHECK_FALSE(*r1.mutual);          // span 1 > 0.9
  CHECK_FALSE(r1.weighted_dev.has_value());
  CHECK_FALSE(r1.pairwise.has_value());

  auto r2 = membership(OpinionVector({1.0, 0.25, 0.25}), inst);
  CHECK_FALSE(r2.owa);              // the midpoint of two members falls outside

  const Instance loose(OpinionVector({0.5, 0.5, 0.5}), WeightVector::uniform(3), omega,
                       std::nullopt, 1.0, 1.0, 1.0, 1.0);
  testutil::Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto r = membership(testutil::random_opinions(rng, 3), loose);
    CHECK(r.owa);
    CHECK(*r.mutual);
    CHECK(*r.weighted_dev);
    CHECK(*r.pairwise);
  }
}

TEST_CASE("instances validate their dimensions and thresholds") {
  const OpinionVector o({0.1, 0.9});
  CHECK_NOTHROW(Instance(o, WeightVector::uniform(2), WeightVector::uniform(2), std::nullopt, 0.5));
  CHECK_THROWS_AS(
      Instance(o, WeightVector::uniform(3), WeightVector::uniform(2), std::nullopt, 0.5),
      DimensionError);
  CHECK_THROWS_AS(
      Instance(o, WeightVector::uniform(2), WeightVector::uniform(2), std::nullopt, 1.5),
      ValidationError);
  CHECK_THROWS_AS(Instance(o, WeightVector::uniform(2), WeightVector::uniform(2),
                           WeightVector::uniform(3), 0.5),
                  DimensionError);
  CHECK_THROWS_AS(Instance(o, WeightVector::uniform(2), WeightVector::uniform(2), std::nullopt,
                           0.5, -0.1),
                  ValidationError);
}
