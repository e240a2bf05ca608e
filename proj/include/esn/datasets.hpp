#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "esn/ts.hpp"

namespace esn {

// Mackey-Glass delay differential equation
//   dx/dt = b_lin * x(t) + a_num * x(t - tau) / (1 + x(t - tau)^exponent)
// Defaults are the delay-17 chaotic benchmark. history is the constant
// value of x on [-tau, 0].
struct MgParams {
    double tau = 17.0;
    double a_num = 0.2;
    double b_lin = -0.1;
    double exponent = 10.0;
    double dt = 0.1;          // integrator step
    std::size_t stride = 10;  // emit every stride-th integrator sample
    double history = 1.2;

    void validate() const;
};

// Fixed-step RK4 with a dense history buffer at dt resolution; delayed
// values are read with 4-point (cubic) interpolation so the integrator
// keeps its order even when stage times fall between grid points.
// Sample i of the result is x(i * stride * dt); sample 0 is the history
// value. Deterministic; throws DivergedError past |x| = 1e6.
TimeSeries mackey_glass(std::size_t n, const MgParams& params = {});

// ARMA(1,1) recursion  X_t = eps_t + 0.81 X_{t-1} + 0.72 eps_{t-1}
// with X_0 = eps_0 = 0 and standard Gaussian innovations drawn from the
// seeded stream. with_trend adds t/1000 + (t/1000)^2 inside the recursion,
// so the AR part propagates the trend. noise_scale multiplies every
// innovation (0 is the deterministic test hook). Values are X_1 .. X_n.
TimeSeries gen_arma(std::size_t n, bool with_trend, std::uint64_t seed,
                    double noise_scale = 1.0);

// X_t = sin((1 + t) * pi^3) for t = 1..n; with_trend adds t/1000.
TimeSeries gen_sine(std::size_t n, bool with_trend);

enum class PreprocessKind { Cubitize, Standardize, Unitize };

// A preprocessing transform with statistics frozen at fit time (from
// training data only), applicable to unseen data and invertible.
//   Cubitize:    (x - min) / (max - min)
//   Standardize: (x - mean) / sqrt(variance)        (population variance)
//   Unitize:     (x - mean) / ||x - mean||_2
class Preprocess {
public:
    static Preprocess fit(PreprocessKind kind, const TimeSeries& train);

    TimeSeries apply(const TimeSeries& s) const;
    TimeSeries invert(const TimeSeries& s) const;

    PreprocessKind kind() const { return kind_; }
    double offset() const { return offset_; }
    double scale() const { return scale_; }

private:
    Preprocess(PreprocessKind kind, double offset, double scale)
        : kind_(kind), offset_(offset), scale_(scale) {}
    PreprocessKind kind_;
    double offset_;  // subtracted first
    double scale_;   // then divided by
};

// CSV: one numeric value per record; an optional single header line is
// skipped; any other unparseable record raises IoError with its 1-based
// line number. Records with several comma-separated fields load their
// first field (so saved pair files round-trip).
TimeSeries load_csv(const std::string& path);
void save_csv(const std::string& path, const TimeSeries& s);
void save_csv_pairs(const std::string& path, const std::string& header_a,
                    const TimeSeries& a, const std::string& header_b, const TimeSeries& b);

}  // namespace esn
