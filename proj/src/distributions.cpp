#include "esn/distributions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "esn/errors.hpp"

namespace esn {

namespace {

constexpr double kPi = std::numbers::pi;

double parse_number(const std::string& tok, const std::string& ctx) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw UsageError("weight spec: bad number '" + tok + "' in " + ctx);
    }
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

}  // namespace

WeightSpec WeightSpec::uniform(double lo, double hi) {
    WeightSpec s;
    s.kind = WeightKind::Uniform;
    s.lo = lo;
    s.hi = hi;
    s.validate();
    return s;
}

WeightSpec WeightSpec::gaussian(double mean, double variance) {
    WeightSpec s;
    s.kind = WeightKind::Gaussian;
    s.mean = mean;
    s.variance = variance;
    s.validate();
    return s;
}

WeightSpec WeightSpec::arcsine(double lo, double hi) {
    WeightSpec s;
    s.kind = WeightKind::Arcsine;
    s.lo = lo;
    s.hi = hi;
    s.validate();
    return s;
}

void WeightSpec::validate() const {
    switch (kind) {
        case WeightKind::Uniform:
        case WeightKind::Arcsine:
            if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
                throw UsageError("weight spec: need finite lo < hi, got [" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + "]");
            }
            break;
        case WeightKind::Gaussian:
            if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
                throw UsageError("weight spec: gaussian needs finite mean and variance > 0");
            }
            break;
    }
}

std::string WeightSpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case WeightKind::Uniform:
            os << "uniform(" << lo << "," << hi << ")";
            break;
        case WeightKind::Gaussian:
            os << "gaussian(mean=" << mean << ",var=" << variance << ")";
            break;
        case WeightKind::Arcsine:
            os << "arcsine(" << lo << "," << hi << ")";
            break;
    }
    return os.str();
}

WeightSpec WeightSpec::parse(const std::string& text) {
    std::string t = trim(text);
    auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')') {
        throw UsageError("weight spec: expected kind(args), got '" + text + "'");
    }
    std::string kind = trim(t.substr(0, open));
    std::string args = t.substr(open + 1, t.size() - open - 2);
    auto comma = args.find(',');
    if (comma == std::string::npos) {
        throw UsageError("weight spec: expected two arguments in '" + text + "'");
    }
    std::string a0 = trim(args.substr(0, comma));
    std::string a1 = trim(args.substr(comma + 1));

    if (kind == "uniform" || kind == "arcsine") {
        double lo = parse_number(a0, text);
        double hi = parse_number(a1, text);
        return kind == "uniform" ? uniform(lo, hi) : arcsine(lo, hi);
    }
    if (kind == "gaussian") {
        auto strip = [&](std::string s, const char* key) {
            auto eq = s.find('=');
            if (eq == std::string::npos || trim(s.substr(0, eq)) != key) {
                throw UsageError("weight spec: expected '" + std::string(key) + "=' in '" + text +
                                 "'");
            }
            return trim(s.substr(eq + 1));
        };
        double mean = parse_number(strip(a0, "mean"), text);
        double var = parse_number(strip(a1, "var"), text);
        return gaussian(mean, var);
    }
    throw UsageError("weight spec: unknown kind '" + kind + "'");
}

std::vector<double> sample(const WeightSpec& spec, RngStream& rng, std::size_t n) {
    spec.validate();
    std::vector<double> out(n);
    switch (spec.kind) {
        case WeightKind::Uniform:
            for (auto& v : out) v = rng.uniform(spec.lo, spec.hi);
            break;
        case WeightKind::Gaussian: {
            double sd = std::sqrt(spec.variance);
            for (auto& v : out) v = rng.gaussian(spec.mean, sd);
            break;
        }
        case WeightKind::Arcsine:
            for (auto& v : out) v = arcsine_from_uniform(rng.uniform01(), spec.lo, spec.hi - spec.lo);
            break;
    }
    return out;
}

double arcsine_pdf(double w, double a, double l) {
    if (!(l > 0.0)) throw UsageError("arcsine_pdf: l must be positive");
    if (w == a || w == a + l) {
        throw UsageError("arcsine_pdf: density is singular at the endpoints");
    }
    if (w < a || w > a + l) return 0.0;
    return 1.0 / (kPi * std::sqrt((w - a) * (a + l - w)));
}

double arcsine_cdf(double w, double a, double l) {
    if (!(l > 0.0)) throw UsageError("arcsine_cdf: l must be positive");
    if (w <= a) return 0.0;
    if (w >= a + l) return 1.0;
    return (2.0 / kPi) * std::asin(std::sqrt((w - a) / l));
}

double arcsine_from_uniform(double u, double a, double l) {
    double s = std::sin(kPi * u / 2.0);
    return a + l * s * s;
}

std::vector<double> sample_arcsine_inverse(RngStream& rng, std::size_t n, double a, double l) {
    if (!(l > 0.0)) throw UsageError("sample_arcsine_inverse: l must be positive");
    std::vector<double> out(n);
    for (auto& v : out) v = arcsine_from_uniform(rng.uniform01(), a, l);
    return out;
}

}  // namespace esn
