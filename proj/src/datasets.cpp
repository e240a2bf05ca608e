#include "esn/datasets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "esn/errors.hpp"
#include "esn/rng.hpp"
#include "esn/textio.hpp"

namespace esn {

namespace {

constexpr double kDivergenceGuard = 1e6;

double mg_rhs(const MgParams& p, double x, double x_delayed) {
    return p.b_lin * x + p.a_num * x_delayed / (1.0 + std::pow(x_delayed, p.exponent));
}

// Value of x at time t read from the history buffer (h[j] = x(j * dt)).
// Constant history before t = 0. Cubic 4-point Lagrange interpolation where
// the neighbourhood exists, linear at the buffer edges.
double delayed_value(const std::vector<double>& h, double dt, double t, double history) {
    if (t <= 0.0) return history;
    double u = t / dt;
    auto j = static_cast<std::size_t>(u);
    double f = u - static_cast<double>(j);
    if (j + 1 >= h.size()) return h.back();
    if (f == 0.0) return h[j];
    if (j < 1 || j + 2 >= h.size()) return h[j] * (1.0 - f) + h[j + 1] * f;
    double xm = h[j - 1], x0 = h[j], x1 = h[j + 1], x2 = h[j + 2];
    double a = f + 1.0, b = f, c = f - 1.0, d = f - 2.0;
    return -xm * b * c * d / 6.0 + x0 * a * c * d / 2.0 - x1 * a * b * d / 2.0 +
           x2 * a * b * c / 6.0;
}

double stats_mean(const std::vector<double>& v) {
    return compensated_sum(v) / static_cast<double>(v.size());
}

}  // namespace

void MgParams::validate() const {
    if (!(tau > 0.0)) throw UsageError("mackey_glass: tau must be positive");
    if (!(dt > 0.0)) throw UsageError("mackey_glass: dt must be positive");
    if (stride < 1) throw UsageError("mackey_glass: stride must be >= 1");
    if (!(exponent > 0.0)) throw UsageError("mackey_glass: exponent must be positive");
}

TimeSeries mackey_glass(std::size_t n, const MgParams& p) {
    p.validate();
    if (n < 1) throw UsageError("mackey_glass: n must be >= 1");

    std::vector<double> h;
    h.reserve(n * p.stride + 8);
    h.push_back(p.history);
    std::vector<double> out;
    out.reserve(n);
    out.push_back(p.history);

    for (std::size_t k = 0; out.size() < n; ++k) {
        double t = static_cast<double>(k) * p.dt;
        double x = h[k];
        auto lag = [&](double tt) { return delayed_value(h, p.dt, tt - p.tau, p.history); };
        double d1 = mg_rhs(p, x, lag(t));
        double d2 = mg_rhs(p, x + 0.5 * p.dt * d1, lag(t + 0.5 * p.dt));
        double d3 = mg_rhs(p, x + 0.5 * p.dt * d2, lag(t + 0.5 * p.dt));
        double d4 = mg_rhs(p, x + p.dt * d3, lag(t + p.dt));
        double xn = x + p.dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
        if (!std::isfinite(xn) || std::abs(xn) > kDivergenceGuard) {
            throw DivergedError("mackey_glass: integrator diverged", k + 1);
        }
        h.push_back(xn);
        if ((k + 1) % p.stride == 0) out.push_back(xn);
    }
    out.resize(n);
    return TimeSeries{"mg", std::move(out)};
}

TimeSeries gen_arma(std::size_t n, bool with_trend, std::uint64_t seed, double noise_scale) {
    if (n < 1) throw UsageError("gen_arma: n must be >= 1");
    RngStream rng(seed, 0);
    std::vector<double> out;
    out.reserve(n);
    double x_prev = 0.0, eps_prev = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        double eps = noise_scale == 0.0 ? 0.0 : noise_scale * rng.gaussian(0.0, 1.0);
        double x = eps + 0.81 * x_prev + 0.72 * eps_prev;
        if (with_trend) {
            double u = static_cast<double>(t) / 1000.0;
            x += u + u * u;
        }
        out.push_back(x);
        x_prev = x;
        eps_prev = eps;
    }
    return TimeSeries{with_trend ? "arma_trend" : "arma", std::move(out)};
}

TimeSeries gen_sine(std::size_t n, bool with_trend) {
    if (n < 1) throw UsageError("gen_sine: n must be >= 1");
    const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t t = 1; t <= n; ++t) {
        double x = std::sin((1.0 + static_cast<double>(t)) * pi3);
        if (with_trend) x += static_cast<double>(t) / 1000.0;
        out.push_back(x);
    }
    return TimeSeries{with_trend ? "sine_trend" : "sine", std::move(out)};
}

Preprocess Preprocess::fit(PreprocessKind kind, const TimeSeries& train) {
    validate_series(train);
    const auto& v = train.values;
    switch (kind) {
        case PreprocessKind::Cubitize: {
            double lo = v[0], hi = v[0];
            for (double x : v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            if (!(hi > lo)) {
                throw DegenerateDataError("cubitize: constant training series (max == min)");
            }
            return Preprocess(kind, lo, hi - lo);
        }
        case PreprocessKind::Standardize: {
            double mean = stats_mean(v);
            std::vector<double> sq(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                double d = v[i] - mean;
                sq[i] = d * d;
            }
            double var = compensated_sum(sq) / static_cast<double>(v.size());
            if (!(var > 0.0)) {
                throw DegenerateDataError("standardize: zero-variance training series");
            }
            return Preprocess(kind, mean, std::sqrt(var));
        }
        case PreprocessKind::Unitize: {
            double mean = stats_mean(v);
            std::vector<double> sq(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                double d = v[i] - mean;
                sq[i] = d * d;
            }
            double norm = std::sqrt(compensated_sum(sq));
            if (!(norm > 0.0)) {
                throw DegenerateDataError("unitize: zero centered norm in training series");
            }
            return Preprocess(kind, mean, norm);
        }
    }
    throw UsageError("preprocess: unknown kind");
}

TimeSeries Preprocess::apply(const TimeSeries& s) const {
    validate_series(s);
    std::vector<double> out(s.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (s.values[i] - offset_) / scale_;
    return TimeSeries{s.name, std::move(out)};
}

TimeSeries Preprocess::invert(const TimeSeries& s) const {
    validate_series(s);
    std::vector<double> out(s.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.values[i] * scale_ + offset_;
    return TimeSeries{s.name, std::move(out)};
}

TimeSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file", path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::string field = t.substr(0, t.find(','));
        auto v = parse_double(field);
        if (!v) {
            if (first_content_line) {  // a single header line is allowed
                first_content_line = false;
                continue;
            }
            throw IoError("unparseable record '" + trim(field) + "'", path, lineno);
        }
        first_content_line = false;
        values.push_back(*v);
    }
    if (values.empty()) throw IoError("no numeric records in file", path);
    return TimeSeries{path, std::move(values)};
}

void save_csv(const std::string& path, const TimeSeries& s) {
    validate_series(s);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing", path);
    out << "value\n";
    for (double v : s.values) out << format_g17(v) << "\n";
    if (!out) throw IoError("write failed", path);
}

void save_csv_pairs(const std::string& path, const std::string& header_a, const TimeSeries& a,
                    const std::string& header_b, const TimeSeries& b) {
    if (a.size() != b.size()) throw UsageError("save_csv_pairs: column lengths differ");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing", path);
    out << header_a << "," << header_b << "\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << format_g17(a.values[i]) << "," << format_g17(b.values[i]) << "\n";
    }
    if (!out) throw IoError("write failed", path);
}

}  // namespace esn
