#include <doctest.h>

#include <algorithm>
#include <vector>

#include "evsched/errors.hpp"
#include "evsched/pricing.hpp"
#include "evsched/rng.hpp"

using namespace evsched;

namespace {

DemandSeries series_of(std::vector<double> kw) {
  TimeGrid g = TimeGrid::with_slots(static_cast<int>(kw.size()));
  return DemandSeries{g, std::move(kw)};
}

}  // namespace

TEST_SUITE("pricing") {
  TEST_CASE("price hits the bounds at the extremes of the allocation") {
    const auto curve = derive_price_curve(series_of({0.0, 2.0, 8.0, 4.0}), 15.0, 20.0);
    CHECK(curve.cents_per_kwh[2] == doctest::Approx(15.0));  // argmax -> cheapest
    CHECK(curve.cents_per_kwh[0] == doctest::Approx(20.0));  // argmin -> priciest
    CHECK(curve.e_min == 0.0);
    CHECK(curve.e_max == 8.0);
    for (double f : curve.cents_per_kwh) {
      CHECK(f >= 15.0);
      CHECK(f <= 20.0);
    }
  }

  TEST_CASE("constant allocation degenerates to the average of the bounds") {
    const auto curve = derive_price_curve(series_of({3.0, 3.0, 3.0}), 15.0, 20.0);
    for (double f : curve.cents_per_kwh) CHECK(f == doctest::Approx(17.5));
  }

  TEST_CASE("midway allocation prices at the midpoint") {
    const auto curve = derive_price_curve(series_of({0.0, 5.0, 10.0}), 15.0, 20.0);
    CHECK(curve.cents_per_kwh[1] == doctest::Approx(17.5));
  }

  TEST_CASE("literal direction increases with the allocation") {
    const auto curve =
        derive_price_curve(series_of({0.0, 10.0}), 15.0, 20.0, PriceDirection::literal);
    CHECK(curve.cents_per_kwh[0] == doctest::Approx(15.0));
    CHECK(curve.cents_per_kwh[1] == doctest::Approx(20.0));
  }

  TEST_CASE("bad bounds are rejected") {
    CHECK_THROWS_AS(derive_price_curve(series_of({1.0}), 20.0, 15.0), ParameterError);
  }

  TEST_CASE("anti-monotone mapping and affine invariance") {
    SeedStream rng(99);
    std::vector<double> kw(48);
    for (double& v : kw) v = rng.uniform(0.0, 12.0);
    const auto base = derive_price_curve(series_of(kw), 15.0, 20.0);

    for (size_t a = 0; a < kw.size(); ++a)
      for (size_t b = 0; b < kw.size(); ++b)
        if (kw[a] >= kw[b]) CHECK(base.cents_per_kwh[a] <= base.cents_per_kwh[b] + 1e-12);

    // positive affine rescaling of the allocation leaves prices unchanged
    std::vector<double> scaled(kw.size());
    for (size_t t = 0; t < kw.size(); ++t) scaled[t] = 3.5 * kw[t] + 2.25;
    const auto rescaled = derive_price_curve(series_of(scaled), 15.0, 20.0);
    for (size_t t = 0; t < kw.size(); ++t)
      CHECK(rescaled.cents_per_kwh[t] == doctest::Approx(base.cents_per_kwh[t]).epsilon(1e-12));
  }
}
