#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "esn/rng.hpp"

namespace esn {

enum class WeightKind { Uniform, Gaussian, Arcsine };

// Declarative description of a random-weight law. Uniform and Arcsine use
// the support [lo, hi]; Gaussian uses mean/variance. The canonical textual
// form (used verbatim in config files) is
//   uniform(-0.5,0.5)   gaussian(mean=0,var=0.0833333)   arcsine(-0.5,0.5)
struct WeightSpec {
    WeightKind kind = WeightKind::Uniform;
    double lo = -0.5;
    double hi = 0.5;
    double mean = 0.0;
    double variance = 1.0 / 12.0;

    static WeightSpec uniform(double lo, double hi);
    static WeightSpec gaussian(double mean, double variance);
    static WeightSpec arcsine(double lo, double hi);

    // The four laws compared in the experiments. Same-variance matches the
    // variance of uniform(-0.5,0.5), i.e. 1/12; same-range puts 3 sigma at
    // the uniform bounds, i.e. variance 1/36, without truncation.
    static WeightSpec preset_uniform() { return uniform(-0.5, 0.5); }
    static WeightSpec preset_gaussian_same_variance() { return gaussian(0.0, 1.0 / 12.0); }
    static WeightSpec preset_gaussian_same_range() { return gaussian(0.0, 1.0 / 36.0); }
    static WeightSpec preset_arcsine() { return arcsine(-0.5, 0.5); }

    void validate() const;  // throws UsageError on a malformed spec

    std::string to_string() const;
    static WeightSpec parse(const std::string& text);
};

// n draws from the law, advancing rng. Uniform/Arcsine draws lie in
// [lo, hi]; Gaussian draws are untruncated.
std::vector<double> sample(const WeightSpec& spec, RngStream& rng, std::size_t n);

// Arcsine density on [a, a+l]: 1 / (pi * sqrt((w-a)(a+l-w))).
// Zero outside the closed interval; the density diverges at the endpoints,
// so evaluating exactly there throws UsageError.
double arcsine_pdf(double w, double a, double l);

// Arcsine CDF on [a, a+l]: (2/pi) * asin(sqrt((w-a)/l)).
// Clamps to 0/1 outside the interval.
double arcsine_cdf(double w, double a, double l);

// Inverse-CDF transform of a single uniform(0,1) variate:
//   w = a + l * sin^2(pi * u / 2)
double arcsine_from_uniform(double u, double a, double l);

// n inverse-transform draws; matches arcsine_cdf in distribution.
std::vector<double> sample_arcsine_inverse(RngStream& rng, std::size_t n, double a, double l);

}  // namespace esn
