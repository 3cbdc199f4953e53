#include "moskit/metrics.hpp"

#include "moskit/errors.hpp"
#include "moskit/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace moskit;

namespace {

// Plain-loop reimplementations used as oracles against the library versions.
double oracle_rmse(const std::vector<double>& x, const std::vector<double>& y, double denom_off) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(ss / (static_cast<double>(x.size()) - denom_off));
}

double oracle_pcc(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_CASE("prediction error is label minus prediction") {
    const auto err = perror({3.0, 4.0}, {3.5, 2.0});
    REQUIRE(err.size() == 2);
    CHECK(err[0] == -0.5);
    CHECK(err[1] == 2.0);
    CHECK_THROWS_AS((void)perror({1.0}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("rmse uses the N-1 denominator") {
    CHECK(rmse({3.0, 3.0}, {4.0, 4.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rmse({3.0, 3.0}, {4.0, 4.0}, RmseDenominator::n) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rmse({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK_THROWS_AS((void)rmse({1.0}, {1.0}), ValidationError);
}

TEST_CASE("pcc matches hand values and clamps to [-1, 1]") {
    CHECK(pcc({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pcc({1.0, 2.0, 3.0}, {10.0, 20.0, 30.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pcc({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)pcc({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), ValidationError);
}

TEST_CASE("outlier ratio uses a strict comparison against ci95") {
    CHECK(outlier_ratio({3.0, 3.0}, {0.5, 0.5}, {3.5, 3.6}) == 0.5);
    CHECK(outlier_ratio({3.0}, {0.0}, {3.0}) == 0.0);   // |e| = 0 is not > 0
    CHECK(outlier_ratio({3.0}, {0.0}, {3.001}) == 1.0); // any error beats a zero interval
    CHECK_THROWS_AS((void)outlier_ratio({3.0}, {-0.1}, {3.0}), ValidationError);
}

TEST_CASE("metric values match loop oracles on random instances") {
    Prng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(60);
        std::vector<double> mos(n), pred(n), ci(n);
        for (std::size_t i = 0; i < n; ++i) {
            mos[i] = rng.uniform(1.0, 5.0);
            pred[i] = rng.uniform(0.5, 5.5);
            ci[i] = rng.uniform(0.0, 0.6);
        }
        CHECK(rmse(mos, pred) == doctest::Approx(oracle_rmse(mos, pred, 1.0)).epsilon(1e-12));
        CHECK(rmse(mos, pred, RmseDenominator::n) ==
              doctest::Approx(oracle_rmse(mos, pred, 0.0)).epsilon(1e-12));
        CHECK(pcc(mos, pred) == doctest::Approx(oracle_pcc(mos, pred)).epsilon(1e-10));

        std::size_t outliers = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(mos[i] - pred[i]) > ci[i]) ++outliers;
        CHECK(outlier_ratio(mos, ci, pred) ==
              doctest::Approx(static_cast<double>(outliers) / static_cast<double>(n))
                  .epsilon(1e-15));
    }
}

TEST_CASE("non-finite inputs are rejected") {
    const double nan = std::nan("");
    CHECK_THROWS_AS((void)rmse({1.0, nan}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS((void)pcc({1.0, 2.0}, {1.0, nan}), ValidationError);
    CHECK_THROWS_AS((void)outlier_ratio({1.0, 2.0}, {0.1, nan}, {1.0, 2.0}), ValidationError);
}
