#include "esn/reservoir.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "esn/errors.hpp"
#include "esn/rng.hpp"
#include "esn/textio.hpp"

namespace esn {

namespace {

constexpr double kStateGuard = 1e6;
constexpr double kOutputGuard = 1e6;

std::vector<std::string> split_args(const std::string& text, const std::string& kind) {
    auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')') {
        throw UsageError(kind + ": expected name(args), got '" + text + "'");
    }
    std::string args = text.substr(open + 1, text.size() - open - 2);
    std::vector<std::string> out;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    return out;
}

double arg_number(const std::string& tok, const std::string& ctx) {
    auto v = parse_double(tok);
    if (!v) throw UsageError(ctx + ": bad number '" + tok + "'");
    return *v;
}

}  // namespace

AlphaMode AlphaMode::fixed(double alpha) {
    AlphaMode m;
    m.kind = Kind::Fixed;
    m.alpha = alpha;
    m.validate();
    return m;
}

AlphaMode AlphaMode::dynamic(double lo, double hi) {
    AlphaMode m;
    m.kind = Kind::Dynamic;
    m.lo = lo;
    m.hi = hi;
    m.validate();
    return m;
}

void AlphaMode::validate() const {
    if (kind == Kind::Fixed) {
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw UsageError("alpha: fixed leaking rate must lie in (0,1], got " +
                             std::to_string(alpha));
        }
    } else {
        if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) {
            throw UsageError("alpha: dynamic range must satisfy 0 < lo <= hi <= 1");
        }
    }
}

std::string AlphaMode::to_string() const {
    if (kind == Kind::Fixed) return "fixed(" + format_g17(alpha) + ")";
    return "dynamic(" + format_g17(lo) + "," + format_g17(hi) + ")";
}

AlphaMode AlphaMode::parse(const std::string& text) {
    std::string t = trim(text);
    if (auto v = parse_double(t)) return fixed(*v);  // bare number means fixed
    auto args = split_args(t, "alpha");
    if (t.rfind("fixed", 0) == 0 && args.size() == 1) return fixed(arg_number(args[0], "alpha"));
    if (t.rfind("dynamic", 0) == 0 && args.size() == 2) {
        return dynamic(arg_number(args[0], "alpha"), arg_number(args[1], "alpha"));
    }
    throw UsageError("alpha: expected fixed(a) or dynamic(lo,hi), got '" + text + "'");
}

StateNoise StateNoise::gaussian(double scale) {
    StateNoise n;
    n.law = Law::Gaussian;
    n.scale = scale;
    n.validate();
    return n;
}

StateNoise StateNoise::uniform(double scale) {
    StateNoise n;
    n.law = Law::Uniform;
    n.scale = scale;
    n.validate();
    return n;
}

void StateNoise::validate() const {
    if (law != Law::None && !(scale > 0.0)) {
        throw UsageError("state_noise: scale must be positive");
    }
}

std::string StateNoise::to_string() const {
    switch (law) {
        case Law::None: return "none";
        case Law::Gaussian: return "gaussian(" + format_g17(scale) + ")";
        case Law::Uniform: return "uniform(" + format_g17(scale) + ")";
    }
    return "none";
}

StateNoise StateNoise::parse(const std::string& text) {
    std::string t = trim(text);
    if (t == "none") return none();
    auto args = split_args(t, "state_noise");
    if (t.rfind("gaussian", 0) == 0 && args.size() == 1) {
        return gaussian(arg_number(args[0], "state_noise"));
    }
    if (t.rfind("uniform", 0) == 0 && args.size() == 1) {
        return uniform(arg_number(args[0], "state_noise"));
    }
    throw UsageError("state_noise: expected none, gaussian(s) or uniform(s), got '" + text + "'");
}

InitStateSpec InitStateSpec::gaussian_perturb(double sigma) {
    InitStateSpec s;
    s.kind = Kind::GaussianPerturb;
    s.sigma = sigma;
    s.validate();
    return s;
}

InitStateSpec InitStateSpec::uniform_perturb(double lo, double hi) {
    InitStateSpec s;
    s.kind = Kind::UniformPerturb;
    s.lo = lo;
    s.hi = hi;
    s.validate();
    return s;
}

void InitStateSpec::validate() const {
    if (kind == Kind::GaussianPerturb && !(sigma > 0.0)) {
        throw UsageError("init_state: gaussian sigma must be positive");
    }
    if (kind == Kind::UniformPerturb && !(lo < hi)) {
        throw UsageError("init_state: uniform perturbation needs lo < hi");
    }
}

std::string InitStateSpec::to_string() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::GaussianPerturb: return "gaussian(" + format_g17(sigma) + ")";
        case Kind::UniformPerturb:
            return "uniform(" + format_g17(lo) + "," + format_g17(hi) + ")";
    }
    return "zero";
}

InitStateSpec InitStateSpec::parse(const std::string& text) {
    std::string t = trim(text);
    if (t == "zero") return zero();
    auto args = split_args(t, "init_state");
    if (t.rfind("gaussian", 0) == 0 && args.size() == 1) {
        return gaussian_perturb(arg_number(args[0], "init_state"));
    }
    if (t.rfind("uniform", 0) == 0 && args.size() == 2) {
        return uniform_perturb(arg_number(args[0], "init_state"),
                               arg_number(args[1], "init_state"));
    }
    throw UsageError("init_state: expected zero, gaussian(sigma) or uniform(lo,hi), got '" +
                     text + "'");
}

void EsnConfig::validate() const {
    if (k_in < 1 || l_out < 1) throw UsageError("esn config: k_in and l_out must be >= 1");
    if (n_res < 1) throw UsageError("esn config: n_res must be >= 1");
    w_in_spec.validate();
    w_spec.validate();
    if (!(input_scaling > 0.0)) throw UsageError("esn config: input_scaling must be positive");
    if (!(density > 0.0 && density <= 1.0)) {
        throw UsageError("esn config: density must lie in (0,1]");
    }
    if (!(rho > 0.0)) throw UsageError("esn config: rho must be positive");
    alpha.validate();
    state_noise.validate();
    init_state.validate();
    if (!(beta >= 0.0)) throw UsageError("esn config: beta must be >= 0");
}

EsnModel init_esn(const EsnConfig& config) {
    config.validate();
    const std::size_t n = config.n_res;
    const std::size_t k = config.k_in;

    EsnModel model;
    model.config = config;

    RngStream rin(config.master_seed, streams::kWIn);
    auto win_values = sample(config.w_in_spec, rin, n * (1 + k));
    for (auto& v : win_values) v *= config.input_scaling;
    model.w_in = Matrix(n, 1 + k, std::move(win_values));

    RngStream rw(config.master_seed, streams::kW);
    auto w_values = sample(config.w_spec, rw, n * n);
    if (config.density < 1.0) {
        // Keep exactly floor(density * N^2) entries so the zero fraction is
        // never below 1 - density; selection is a partial Fisher-Yates fed
        // by the same stream.
        std::size_t total = n * n;
        auto keep = static_cast<std::size_t>(config.density * static_cast<double>(total));
        std::vector<std::uint32_t> idx(total);
        for (std::size_t i = 0; i < total; ++i) idx[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < keep; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rw.next_u64() % (total - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<double> masked(total, 0.0);
        for (std::size_t i = 0; i < keep; ++i) masked[idx[i]] = w_values[idx[i]];
        w_values = std::move(masked);
    }
    Matrix w_raw(n, n, std::move(w_values));
    try {
        model.w = scale_to_spectral_radius(w_raw, config.rho, 1e-6, kScalingRadiusMaxIter);
    } catch (const ScaleError& e) {
        throw ScaleError(std::string(e.what()) +
                         "; the masked reservoir has no usable weights - raise density or n_res");
    }

    if (config.feedback_enabled) {
        RngStream rback(config.master_seed, streams::kWBack);
        model.w_back = Matrix(n, config.l_out, sample(config.w_spec, rback, n * config.l_out));
    }

    model.last_state.assign(n, 0.0);
    return model;
}

double measured_radius(const EsnModel& model) {
    return spectral_radius(model.w, 1e-6, kScalingRadiusMaxIter).radius;
}

std::vector<double> update_state(const EsnModel& model, const std::vector<double>& x_prev,
                                 const std::vector<double>& u, const std::vector<double>& y_prev,
                                 double alpha_n, const std::vector<double>* tau_n) {
    const std::size_t n = model.config.n_res;
    if (x_prev.size() != n) throw UsageError("update_state: state size mismatch");
    if (u.size() != model.config.k_in) throw UsageError("update_state: input size mismatch");
    if (!(alpha_n > 0.0 && alpha_n <= 1.0)) {
        throw UsageError("update_state: alpha must lie in (0,1]");
    }

    std::vector<double> in(1 + u.size());
    in[0] = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) in[1 + i] = u[i];
    std::vector<double> z = matvec(model.w_in, in);
    std::vector<double> wx = matvec(model.w, x_prev);
    for (std::size_t i = 0; i < n; ++i) z[i] += wx[i];
    if (model.config.feedback_enabled) {
        if (!model.w_back) throw UsageError("update_state: feedback enabled but w_back missing");
        std::vector<double> fb = matvec(*model.w_back, y_prev);
        for (std::size_t i = 0; i < n; ++i) z[i] += fb[i];
    }
    if (tau_n) {
        if (tau_n->size() != n) throw UsageError("update_state: noise size mismatch");
        for (std::size_t i = 0; i < n; ++i) z[i] += (*tau_n)[i];
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double zi = z[i];
        if (!std::isfinite(zi) || std::abs(zi) > kStateGuard) {
            throw DivergedError("state update: pre-activation exceeded divergence guard");
        }
        x[i] = (1.0 - alpha_n) * x_prev[i] + alpha_n * std::tanh(zi);
    }
    return x;
}

std::vector<double> initial_state(const EsnConfig& config, RngStream& rng) {
    std::vector<double> x(config.n_res, 0.0);
    switch (config.init_state.kind) {
        case InitStateSpec::Kind::Zero:
            break;
        case InitStateSpec::Kind::GaussianPerturb:
            for (auto& v : x) v = rng.gaussian(0.0, config.init_state.sigma);
            break;
        case InitStateSpec::Kind::UniformPerturb:
            for (auto& v : x) v = rng.uniform(config.init_state.lo, config.init_state.hi);
            break;
    }
    return x;
}

namespace {

// Shared per-step draw state for harvest and prediction loops.
struct StepDraws {
    const EsnConfig& config;
    RngStream alpha_rng;
    RngStream noise_rng;
    std::vector<double> tau;

    StepDraws(const EsnConfig& cfg, std::uint64_t alpha_stream, std::uint64_t noise_stream)
        : config(cfg),
          alpha_rng(cfg.master_seed, alpha_stream),
          noise_rng(cfg.master_seed, noise_stream) {}

    double next_alpha() {
        if (config.alpha.kind == AlphaMode::Kind::Dynamic) {
            return alpha_rng.uniform(config.alpha.lo, config.alpha.hi);
        }
        return config.alpha.alpha;
    }

    const std::vector<double>* next_tau() {
        if (config.state_noise.law == StateNoise::Law::None) return nullptr;
        tau.resize(config.n_res);
        if (config.state_noise.law == StateNoise::Law::Gaussian) {
            for (auto& v : tau) v = noise_rng.gaussian(0.0, config.state_noise.scale);
        } else {
            for (auto& v : tau) {
                v = noise_rng.uniform(-config.state_noise.scale, config.state_noise.scale);
            }
        }
        return &tau;
    }
};

void require_univariate(const EsnModel& model, const char* op) {
    if (model.config.k_in != 1 || model.config.l_out != 1) {
        throw UsageError(std::string(op) + ": series interface requires k_in = l_out = 1");
    }
}

double readout(const EsnModel& model, double u, const std::vector<double>& x) {
    const Matrix& w_out = *model.w_out;
    double y = w_out(0, 0) + w_out(0, 1) * u;
    const auto& data = w_out.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += data[2 + i] * x[i];
    return y + acc;
}

}  // namespace

HarvestResult harvest_states(const EsnModel& model, const TimeSeries& series) {
    require_univariate(model, "harvest_states");
    validate_series(series);
    const std::size_t washout = model.config.washout_len;
    if (series.size() < washout + 2) {
        throw UsageError("harvest_states: series length " + std::to_string(series.size()) +
                         " too short for washout " + std::to_string(washout));
    }
    const std::size_t n = model.config.n_res;
    const std::size_t total = series.size() - 1;
    const std::size_t t_cols = total - washout;

    HarvestResult r;
    r.s = Matrix(2 + n, t_cols);
    r.targets = Matrix(1, t_cols);

    RngStream init_rng(model.config.master_seed, streams::kInitState);
    std::vector<double> x = initial_state(model.config, init_rng);
    StepDraws draws(model.config, streams::kHarvestAlpha, streams::kHarvestNoise);

    std::vector<double> u(1), y_prev{series[0]};
    for (std::size_t step = 1; step <= total; ++step) {
        u[0] = series[step - 1];
        try {
            x = update_state(model, x, u, y_prev, draws.next_alpha(), draws.next_tau());
        } catch (const DivergedError& e) {
            throw DivergedError(std::string("harvest_states: ") + e.what(), step);
        }
        if (step > washout) {
            std::size_t c = step - washout - 1;
            r.s(0, c) = 1.0;
            r.s(1, c) = u[0];
            for (std::size_t i = 0; i < n; ++i) r.s(2 + i, c) = x[i];
            r.targets(0, c) = series[step];
        }
        y_prev[0] = series[step];  // teacher-forced previous output
    }
    r.final_state = std::move(x);
    r.final_input = {series.values.back()};
    return r;
}

EsnModel train_readout(EsnModel model, const TimeSeries& series) {
    HarvestResult h = harvest_states(model, series);
    model.w_out = ridge_solve(h.s, h.targets, model.config.beta);
    model.last_state = std::move(h.final_state);
    model.last_input = std::move(h.final_input);
    return model;
}

TimeSeries predict_generative(const EsnModel& model, std::size_t n_steps) {
    require_univariate(model, "predict_generative");
    if (!model.trained()) throw UsageError("predict_generative: model is untrained");
    if (n_steps < 1) throw UsageError("predict_generative: n_steps must be >= 1");
    if (model.last_input.empty()) {
        throw UsageError("predict_generative: model has no continuation input");
    }

    std::vector<double> x = model.last_state;
    StepDraws draws(model.config, streams::kPredictAlpha, streams::kPredictNoise);
    std::vector<double> u{model.last_input[0]}, y_prev{model.last_input[0]};
    std::vector<double> out;
    out.reserve(n_steps);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        try {
            x = update_state(model, x, u, y_prev, draws.next_alpha(), draws.next_tau());
        } catch (const DivergedError& e) {
            throw DivergedError(std::string("predict_generative: ") + e.what(), step);
        }
        double y = readout(model, u[0], x);
        if (!std::isfinite(y) || std::abs(y) > kOutputGuard) {
            throw DivergedError("predict_generative: output exceeded divergence guard", step);
        }
        out.push_back(y);
        u[0] = y;  // the prediction becomes the next input
        y_prev[0] = y;
    }
    return TimeSeries{"generative", std::move(out)};
}

TimeSeries predict_guided(const EsnModel& model, const TimeSeries& inputs) {
    require_univariate(model, "predict_guided");
    if (!model.trained()) throw UsageError("predict_guided: model is untrained");
    validate_series(inputs);

    std::vector<double> x = model.last_state;
    StepDraws draws(model.config, streams::kPredictAlpha, streams::kPredictNoise);
    std::vector<double> u(1), y_prev{inputs[0]};
    std::vector<double> out;
    out.reserve(inputs.size());
    for (std::size_t step = 1; step <= inputs.size(); ++step) {
        u[0] = inputs[step - 1];
        try {
            x = update_state(model, x, u, y_prev, draws.next_alpha(), draws.next_tau());
        } catch (const DivergedError& e) {
            throw DivergedError(std::string("predict_guided: ") + e.what(), step);
        }
        double y = readout(model, u[0], x);
        if (!std::isfinite(y) || std::abs(y) > kOutputGuard) {
            throw DivergedError("predict_guided: output exceeded divergence guard", step);
        }
        out.push_back(y);
        y_prev[0] = y;
    }
    return TimeSeries{"guided", std::move(out)};
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void write_matrix(std::ofstream& out, const std::optional<Matrix>& m) {
    if (!m) return;
    for (std::size_t i = 0; i < m->rows(); ++i) {
        for (std::size_t j = 0; j < m->cols(); ++j) {
            if (j) out << ' ';
            out << format_g17((*m)(i, j));
        }
        out << '\n';
    }
}

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              std::size_t lineno) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        auto v = parse_double(tok);
        if (!v) throw IoError("model file: bad number '" + tok + "'", path, lineno);
        row.push_back(*v);
    }
    return row;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows, const std::string& path,
                      const std::string& section) {
    if (rows.empty()) return Matrix();
    std::size_t cols = rows[0].size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw IoError("model file: ragged rows in section " + section, path);
        }
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(data));
}

}  // namespace

void save_model(const EsnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing", path);
    const EsnConfig& c = model.config;
    out << "[dims]\n";
    out << "k_in " << c.k_in << "\n";
    out << "n_res " << c.n_res << "\n";
    out << "l_out " << c.l_out << "\n";
    out << "[config]\n";
    out << "w_in_spec " << c.w_in_spec.to_string() << "\n";
    out << "w_spec " << c.w_spec.to_string() << "\n";
    out << "input_scaling " << format_g17(c.input_scaling) << "\n";
    out << "density " << format_g17(c.density) << "\n";
    out << "rho " << format_g17(c.rho) << "\n";
    out << "alpha " << c.alpha.to_string() << "\n";
    out << "state_noise " << c.state_noise.to_string() << "\n";
    out << "init_state " << c.init_state.to_string() << "\n";
    out << "feedback " << (c.feedback_enabled ? 1 : 0) << "\n";
    out << "beta " << format_g17(c.beta) << "\n";
    out << "washout " << c.washout_len << "\n";
    out << "master_seed " << c.master_seed << "\n";
    if (!model.last_input.empty()) {
        out << "last_input";
        for (double v : model.last_input) out << ' ' << format_g17(v);
        out << "\n";
    }
    out << "[w_in]\n";
    write_matrix(out, model.w_in);
    out << "[w]\n";
    write_matrix(out, model.w);
    out << "[w_back]\n";
    write_matrix(out, model.w_back);
    out << "[w_out]\n";
    write_matrix(out, model.w_out);
    out << "[last_state]\n";
    if (!model.last_state.empty()) {
        for (std::size_t i = 0; i < model.last_state.size(); ++i) {
            if (i) out << ' ';
            out << format_g17(model.last_state[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed", path);
}

EsnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file", path);

    EsnModel model;
    EsnConfig& c = model.config;
    std::string section;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;

    auto flush_section = [&](const std::string& done) {
        if (done == "[w_in]") {
            model.w_in = rows_to_matrix(rows, path, done);
        } else if (done == "[w]") {
            model.w = rows_to_matrix(rows, path, done);
        } else if (done == "[w_back]") {
            Matrix m = rows_to_matrix(rows, path, done);
            if (!m.empty()) model.w_back = std::move(m);
        } else if (done == "[w_out]") {
            Matrix m = rows_to_matrix(rows, path, done);
            if (!m.empty()) model.w_out = std::move(m);
        } else if (done == "[last_state]") {
            model.last_state = rows.empty() ? std::vector<double>{} : rows[0];
        }
        rows.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            flush_section(section);
            section = t;
            continue;
        }
        if (section == "[dims]" || section == "[config]") {
            auto sp = t.find(' ');
            if (sp == std::string::npos) {
                throw IoError("model file: expected 'key value'", path, lineno);
            }
            std::string key = t.substr(0, sp);
            std::string value = trim(t.substr(sp + 1));
            try {
                if (key == "k_in") c.k_in = std::stoul(value);
                else if (key == "n_res") c.n_res = std::stoul(value);
                else if (key == "l_out") c.l_out = std::stoul(value);
                else if (key == "w_in_spec") c.w_in_spec = WeightSpec::parse(value);
                else if (key == "w_spec") c.w_spec = WeightSpec::parse(value);
                else if (key == "input_scaling") c.input_scaling = arg_number(value, key);
                else if (key == "density") c.density = arg_number(value, key);
                else if (key == "rho") c.rho = arg_number(value, key);
                else if (key == "alpha") c.alpha = AlphaMode::parse(value);
                else if (key == "state_noise") c.state_noise = StateNoise::parse(value);
                else if (key == "init_state") c.init_state = InitStateSpec::parse(value);
                else if (key == "feedback") c.feedback_enabled = value == "1";
                else if (key == "beta") c.beta = arg_number(value, key);
                else if (key == "washout") c.washout_len = std::stoul(value);
                else if (key == "master_seed") c.master_seed = std::stoull(value);
                else if (key == "last_input") model.last_input = parse_row(value, path, lineno);
                else throw IoError("model file: unknown key '" + key + "'", path, lineno);
            } catch (const IoError&) {
                throw;
            } catch (const std::exception& e) {
                throw IoError(std::string("model file: bad value for '") + key + "': " + e.what(),
                              path, lineno);
            }
        } else if (section.empty()) {
            throw IoError("model file: content before first section", path, lineno);
        } else {
            rows.push_back(parse_row(t, path, lineno));
        }
    }
    flush_section(section);

    const std::size_t n = c.n_res;
    if (model.w_in.rows() != n || model.w_in.cols() != 1 + c.k_in) {
        throw IoError("model file: [w_in] shape does not match [dims]", path);
    }
    if (model.w.rows() != n || model.w.cols() != n) {
        throw IoError("model file: [w] shape does not match [dims]", path);
    }
    if (model.w_out && (model.w_out->rows() != c.l_out || model.w_out->cols() != 1 + c.k_in + n)) {
        throw IoError("model file: [w_out] shape does not match [dims]", path);
    }
    if (model.last_state.size() != n) {
        throw IoError("model file: [last_state] length does not match n_res", path);
    }
    return model;
}

}  // namespace esn
