#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "esn/distributions.hpp"
#include "esn/errors.hpp"

using namespace esn;

namespace {

constexpr double kPi = std::numbers::pi;

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

// Two-sided Kolmogorov-Smirnov distance of samples against a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

double variance_of(const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / v.size();
}

}  // namespace

TEST_CASE("preset constants are exact") {
    auto u = WeightSpec::preset_uniform();
    CHECK(u.lo == -0.5);
    CHECK(u.hi == 0.5);
    // width-1 uniform has variance 1/12, the same-variance gaussian encodes
    // exactly that constant
    CHECK((u.hi - u.lo) * (u.hi - u.lo) / 12.0 == 1.0 / 12.0);
    CHECK(WeightSpec::preset_gaussian_same_variance().variance == 1.0 / 12.0);
    CHECK(WeightSpec::preset_gaussian_same_variance().mean == 0.0);
    CHECK(WeightSpec::preset_gaussian_same_range().variance == 1.0 / 36.0);
    auto a = WeightSpec::preset_arcsine();
    CHECK(a.lo == -0.5);
    CHECK(a.hi == 0.5);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(WeightSpec::uniform(0.5, -0.5), UsageError);
    CHECK_THROWS_AS(WeightSpec::uniform(0.5, 0.5), UsageError);
    CHECK_THROWS_AS(WeightSpec::gaussian(0.0, 0.0), UsageError);
    CHECK_THROWS_AS(WeightSpec::gaussian(0.0, -1.0), UsageError);
    CHECK_THROWS_AS(WeightSpec::arcsine(1.0, 1.0), UsageError);
}

TEST_CASE("textual form round trip") {
    for (const auto& spec :
         {WeightSpec::preset_uniform(), WeightSpec::preset_gaussian_same_variance(),
          WeightSpec::preset_gaussian_same_range(), WeightSpec::preset_arcsine(),
          WeightSpec::uniform(-1.25, 2.5), WeightSpec::gaussian(0.5, 0.125)}) {
        WeightSpec back = WeightSpec::parse(spec.to_string());
        CHECK(back.kind == spec.kind);
        CHECK(back.lo == spec.lo);
        CHECK(back.hi == spec.hi);
        CHECK(back.mean == spec.mean);
        CHECK(back.variance == spec.variance);
    }
    CHECK(WeightSpec::parse("uniform(-0.5,0.5)").kind == WeightKind::Uniform);
    CHECK(WeightSpec::parse("gaussian(mean=0,var=0.0833333)").variance ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-5));
    CHECK(WeightSpec::parse("arcsine(-0.5,0.5)").kind == WeightKind::Arcsine);
    CHECK_THROWS_AS(WeightSpec::parse("cauchy(0,1)"), UsageError);
    CHECK_THROWS_AS(WeightSpec::parse("uniform(1)"), UsageError);
    CHECK_THROWS_AS(WeightSpec::parse("gaussian(0,1)"), UsageError);
}

TEST_CASE("uniform sampling variance") {
    RngStream rng(5, 0);
    auto v = sample(WeightSpec::preset_uniform(), rng, 10000);
    CHECK(variance_of(v) == doctest::Approx(1.0 / 12.0).epsilon(0.10));
    for (double x : v) {
        REQUIRE(x >= -0.5);
        REQUIRE(x <= 0.5);
    }
}

TEST_CASE("sampling reproducibility") {
    RngStream r1(77, 4), r2(77, 4);
    auto a = sample(WeightSpec::preset_arcsine(), r1, 1000);
    auto b = sample(WeightSpec::preset_arcsine(), r2, 1000);
    CHECK(a == b);
}

TEST_CASE("all four laws pass a KS test at n = 10^4") {
    const std::size_t n = 10000;
    double d;

    RngStream r1(31, 0);
    d = ks_distance(sample(WeightSpec::preset_uniform(), r1, n),
                    [](double x) { return std::clamp((x + 0.5) / 1.0, 0.0, 1.0); });
    CHECK(d < 0.02);

    RngStream r2(31, 1);
    d = ks_distance(sample(WeightSpec::preset_gaussian_same_variance(), r2, n),
                    [](double x) { return normal_cdf(x, 0.0, std::sqrt(1.0 / 12.0)); });
    CHECK(d < 0.02);

    RngStream r3(31, 2);
    d = ks_distance(sample(WeightSpec::preset_gaussian_same_range(), r3, n),
                    [](double x) { return normal_cdf(x, 0.0, 1.0 / 6.0); });
    CHECK(d < 0.02);

    RngStream r4(31, 3);
    auto arc = sample(WeightSpec::preset_arcsine(), r4, n);
    for (double x : arc) {
        REQUIRE(x >= -0.5);
        REQUIRE(x <= 0.5);
    }
    d = ks_distance(arc, [](double x) { return arcsine_cdf(x, -0.5, 1.0); });
    CHECK(d < 0.02);
}

TEST_CASE("same-range gaussian keeps ~99.7% of mass inside the uniform range") {
    RngStream rng(13, 0);
    auto v = sample(WeightSpec::preset_gaussian_same_range(), rng, 10000);
    std::size_t inside = 0;
    for (double x : v) {
        if (x >= -0.5 && x <= 0.5) ++inside;
    }
    CHECK(static_cast<double>(inside) / v.size() >= 0.995);
}

TEST_CASE("arcsine pdf spot values") {
    CHECK(arcsine_pdf(0.0, -0.5, 1.0) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
    CHECK(arcsine_pdf(0.4, -0.5, 1.0) == doctest::Approx(1.0 / (0.3 * kPi)).epsilon(1e-12));
    CHECK(arcsine_pdf(-0.4, -0.5, 1.0) == doctest::Approx(1.0 / (0.3 * kPi)).epsilon(1e-12));
    CHECK(arcsine_pdf(-0.7, -0.5, 1.0) == 0.0);
    CHECK(arcsine_pdf(0.7, -0.5, 1.0) == 0.0);
    CHECK_THROWS_AS(arcsine_pdf(-0.5, -0.5, 1.0), UsageError);
    CHECK_THROWS_AS(arcsine_pdf(0.5, -0.5, 1.0), UsageError);
}

TEST_CASE("arcsine pdf integrates to ~1") {
    // Simpson quadrature over (a+eps, a+l-eps). The exact mass of that
    // window is 1 - (4/pi) asin(sqrt(eps)) = 0.99872676...; the clipped
    // tails carry the remaining 1.27e-3.
    const double a = -0.5, l = 1.0, eps = 1e-6;
    const double lo = a + eps, hi = a + l - eps;
    const std::size_t intervals = 200000;  // even
    double h = (hi - lo) / intervals;
    double acc = arcsine_pdf(lo, a, l) + arcsine_pdf(hi, a, l);
    for (std::size_t i = 1; i < intervals; ++i) {
        acc += arcsine_pdf(lo + i * h, a, l) * (i % 2 ? 4.0 : 2.0);
    }
    double integral = acc * h / 3.0;
    double exact_window = 1.0 - (4.0 / kPi) * std::asin(std::sqrt(eps));
    CHECK(integral == doctest::Approx(exact_window).epsilon(1e-4));
    CHECK(std::abs(integral - 1.0) < 2e-3);
}

TEST_CASE("arcsine cdf spot values and boundaries") {
    CHECK(arcsine_cdf(0.0, -0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(arcsine_cdf(-0.5, -0.5, 1.0) == 0.0);
    CHECK(arcsine_cdf(0.5, -0.5, 1.0) == 1.0);
    CHECK(arcsine_cdf(0.25, -0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    // clamps outside the support
    CHECK(arcsine_cdf(-1.0, -0.5, 1.0) == 0.0);
    CHECK(arcsine_cdf(1.0, -0.5, 1.0) == 1.0);
}

TEST_CASE("arcsine cdf is monotone") {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        double w = -0.5 + i / 1000.0;
        double f = arcsine_cdf(w, -0.5, 1.0);
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("pdf is the derivative of the cdf") {
    // Central differences, avoiding 1e-3 neighbourhoods of the endpoints
    // where the density blows up.
    const double a = -0.5, l = 1.0, h = 5e-7;
    for (int i = 0; i <= 200; ++i) {
        double w = (a + 1e-3) + i * (l - 2e-3) / 200.0;
        double diff = (arcsine_cdf(w + h, a, l) - arcsine_cdf(w - h, a, l)) / (2.0 * h);
        CHECK(std::abs(diff - arcsine_pdf(w, a, l)) < 1e-6);
    }
}

TEST_CASE("inverse transform boundary and midpoint") {
    CHECK(arcsine_from_uniform(0.0, -0.5, 1.0) == -0.5);
    CHECK(arcsine_from_uniform(1.0, -0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(arcsine_from_uniform(0.5, -0.5, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(arcsine_from_uniform(0.5, 2.0, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("inverse-transform sample mean is the midpoint") {
    RngStream rng(17, 0);
    const std::size_t n = 100000;
    auto v = sample_arcsine_inverse(rng, n, 2.0, 4.0);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    // sd of the arcsine law is l / (2 sqrt 2); three standard errors
    double se = (4.0 / (2.0 * std::numbers::sqrt2)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 4.0) < 3.0 * se);
}
