#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esn/distributions.hpp"
#include "esn/linalg.hpp"
#include "esn/ts.hpp"

namespace esn {

// Leaking rate: fixed alpha in (0,1], or a fresh per-step draw from
// uniform(lo, hi).
struct AlphaMode {
    enum class Kind { Fixed, Dynamic };
    Kind kind = Kind::Fixed;
    double alpha = 0.3;
    double lo = 0.0;
    double hi = 0.0;

    static AlphaMode fixed(double alpha);
    static AlphaMode dynamic(double lo, double hi);
    void validate() const;
    std::string to_string() const;
    static AlphaMode parse(const std::string& text);
};

// Per-step perturbation tau added to the pre-activation: i.i.d. per unit,
// Gaussian(0, scale^2) or uniform(-scale, scale).
struct StateNoise {
    enum class Law { None, Gaussian, Uniform };
    Law law = Law::None;
    double scale = 0.0;

    static StateNoise none() { return {}; }
    static StateNoise gaussian(double scale);
    static StateNoise uniform(double scale);
    void validate() const;
    std::string to_string() const;
    static StateNoise parse(const std::string& text);
};

// Initial state x(0): zeros, or a small random perturbation.
struct InitStateSpec {
    enum class Kind { Zero, GaussianPerturb, UniformPerturb };
    Kind kind = Kind::Zero;
    double sigma = 0.0;  // GaussianPerturb
    double lo = 0.0;     // UniformPerturb
    double hi = 0.0;

    static InitStateSpec zero() { return {}; }
    static InitStateSpec gaussian_perturb(double sigma);
    static InitStateSpec uniform_perturb(double lo, double hi);
    void validate() const;
    std::string to_string() const;
    static InitStateSpec parse(const std::string& text);
};

// Full hyperparameter record. The defaults are the canonical experiment
// frame used throughout the acceptance runs.
struct EsnConfig {
    std::size_t k_in = 1;
    std::size_t n_res = 1000;
    std::size_t l_out = 1;
    WeightSpec w_in_spec = WeightSpec::preset_uniform();
    WeightSpec w_spec = WeightSpec::preset_uniform();
    double input_scaling = 1.0;
    double density = 1.0;  // fraction of nonzero reservoir entries, (0,1]
    double rho = 1.25;     // target spectral radius
    AlphaMode alpha = AlphaMode{};
    StateNoise state_noise = StateNoise::none();
    InitStateSpec init_state = InitStateSpec::zero();
    bool feedback_enabled = false;
    double beta = 1e-8;  // ridge regularizer
    std::size_t washout_len = 100;
    std::uint64_t master_seed = 1;

    void validate() const;
};

// RNG stream ids used by a model; fixed so every draw is replayable from
// (master_seed, stream_id) alone. Prediction uses its own streams, so a
// reloaded model predicts bit-identically without serialized RNG state.
namespace streams {
constexpr std::uint64_t kWIn = 0;
constexpr std::uint64_t kW = 1;
constexpr std::uint64_t kWBack = 2;
constexpr std::uint64_t kHarvestAlpha = 3;
constexpr std::uint64_t kHarvestNoise = 4;
constexpr std::uint64_t kPredictAlpha = 5;
constexpr std::uint64_t kPredictNoise = 6;
constexpr std::uint64_t kInitState = 7;
constexpr std::uint64_t kBootstrap = 8;  // ensemble bagging
}  // namespace streams

struct EsnModel {
    EsnConfig config;
    Matrix w_in;                  // N x (1 + K), bias column first
    Matrix w;                     // N x N, scaled to config.rho
    std::optional<Matrix> w_back; // N x L when feedback is enabled
    std::optional<Matrix> w_out;  // L x (1 + K + N) once trained
    std::vector<double> last_state;  // N; final harvested state after training
    std::vector<double> last_input;  // K; first generative input (last training value)

    bool trained() const { return w_out.has_value(); }
};

// Samples and scales all fixed weights. Deterministic in master_seed.
EsnModel init_esn(const EsnConfig& config);

// Iteration budget for the radius estimate used when scaling reservoirs
// (and when re-measuring them for invariant checks). Large reservoirs have
// tightly clustered edge eigenvalues, so full convergence of plain power
// iteration is not affordable per model; the capped estimate is
// deterministic and scale-homogeneous, which is exactly what rescaling and
// re-measuring need.
constexpr std::size_t kScalingRadiusMaxIter = 2000;

// Re-measures the reservoir radius with the same estimator parameters used
// by init_esn; equals config.rho to within rounding.
double measured_radius(const EsnModel& model);

// One state update:
//   z = W_in [1; u] + W x_prev (+ W_back y_prev) (+ tau)
//   x = (1 - alpha) x_prev + alpha tanh(z)
// tau may be null. Throws DivergedError when z leaves [-1e6, 1e6].
std::vector<double> update_state(const EsnModel& model, const std::vector<double>& x_prev,
                                 const std::vector<double>& u, const std::vector<double>& y_prev,
                                 double alpha_n, const std::vector<double>* tau_n);

// Draws x(0) per config.init_state from the given stream.
std::vector<double> initial_state(const EsnConfig& config, RngStream& rng);

struct HarvestResult {
    Matrix s;        // (1 + K + N) x T regressors [1; u(n); x(n)]
    Matrix targets;  // L x T, next-step values
    std::vector<double> final_state;
    std::vector<double> final_input;  // last series value, never consumed as input
};

// Teacher-forced pass over the series with u(n) = series[n-1] and target
// series[n]; the first washout_len columns are discarded.
HarvestResult harvest_states(const EsnModel& model, const TimeSeries& series);

// Harvest + ridge readout. Returns the trained model with last_state and
// last_input ready for generative continuation.
EsnModel train_readout(EsnModel model, const TimeSeries& series);

// Free-running prediction: feeds each output back as the next input,
// starting from last_state and last_input. Output i estimates the series
// value i+1 steps past the end of training, so it aligns one-to-one with
// the test split. |y| beyond 1e6 throws DivergedError with the step index.
TimeSeries predict_generative(const EsnModel& model, std::size_t n_steps);

// One-step-ahead prediction with true inputs supplied at every step.
TimeSeries predict_guided(const EsnModel& model, const TimeSeries& inputs);

// Single-file text persistence. Sections: [dims], [config], [w_in], [w],
// [w_back], [w_out], [last_state]; matrix rows as space-separated decimals
// at up to 17 significant digits, one row per line. Round-trips
// bit-identically.
void save_model(const EsnModel& model, const std::string& path);
EsnModel load_model(const std::string& path);

}  // namespace esn
