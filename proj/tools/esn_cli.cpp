#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "esn/errors.hpp"
#include "esn/experiment.hpp"

namespace {

int run_cli(int argc, char** argv) {
    CLI::App app{"Echo-state network experiment harness"};
    app.require_subcommand(1);

    // Global flags; subcommands read them when relevant.
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool strict = false;
    std::size_t threads = 1;
    app.add_option("--seed", seed, "Master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--out-dir", out_dir, "Output directory override");
    app.add_flag("--strict", strict, "Exit 2 when any run diverges");
    app.add_option("--threads", threads, "Worker threads for independent runs");

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "Generate a dataset CSV");
    std::string gen_kind = "mg";
    std::size_t gen_n = 4000;
    bool gen_trend = false;
    double gen_noise_scale = 1.0;
    std::string gen_out = "series.csv";
    esn::MgParams mg;
    gen->add_option("--kind", gen_kind, "mg | arma | sine")->capture_default_str();
    gen->add_option("--n", gen_n, "Sample count")->capture_default_str();
    gen->add_flag("--trend", gen_trend, "Add the deterministic trend (arma/sine)");
    gen->add_option("--noise-scale", gen_noise_scale, "ARMA innovation scale");
    gen->add_option("--out", gen_out, "Output CSV path")->capture_default_str();
    gen->add_option("--tau", mg.tau, "MG delay")->capture_default_str();
    gen->add_option("--a-num", mg.a_num, "MG numerator coefficient")->capture_default_str();
    gen->add_option("--b-lin", mg.b_lin, "MG linear coefficient")->capture_default_str();
    gen->add_option("--exponent", mg.exponent, "MG exponent")->capture_default_str();
    gen->add_option("--dt", mg.dt, "MG integrator step")->capture_default_str();
    gen->add_option("--stride", mg.stride, "MG emit stride")->capture_default_str();
    gen->add_option("--history", mg.history, "MG constant history value")->capture_default_str();

    // --- run ---
    auto* run = app.add_subcommand("run", "Run an experiment config");
    std::string run_config;
    run->add_option("config", run_config, "Experiment config file")->required();

    // --- train ---
    auto* train = app.add_subcommand("train", "Train one model from a config");
    std::string train_config, model_out = "model.esn";
    train->add_option("config", train_config, "Experiment config file")->required();
    train->add_option("--model-out", model_out, "Model file to write")->capture_default_str();

    // --- predict ---
    auto* predict = app.add_subcommand("predict", "Predict from a saved model");
    std::string model_path, predict_mode = "generative", inputs_path, predict_out = "pred.csv";
    std::size_t steps = 500;
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--mode", predict_mode, "generative | guided")->capture_default_str();
    predict->add_option("--steps", steps, "Generative step count")->capture_default_str();
    predict->add_option("--inputs", inputs_path, "Input CSV for guided mode");
    predict->add_option("--out", predict_out, "Prediction CSV path")->capture_default_str();

    // --- report-merge ---
    auto* merge = app.add_subcommand("report-merge", "Merge report.csv files");
    std::vector<std::string> merge_inputs;
    merge->add_option("inputs", merge_inputs, "report.csv files")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        esn::DatasetSpec spec;
        spec.n = gen_n;
        spec.trend = gen_trend;
        spec.noise_scale = gen_noise_scale;
        spec.mg = mg;
        spec.seed = seed_set ? seed : 1;
        if (gen_kind == "mg") spec.kind = esn::DatasetSpec::Kind::Mg;
        else if (gen_kind == "arma") spec.kind = esn::DatasetSpec::Kind::Arma;
        else if (gen_kind == "sine") spec.kind = esn::DatasetSpec::Kind::Sine;
        else throw esn::UsageError("gen: unknown kind '" + gen_kind + "'");
        esn::TimeSeries series = esn::build_dataset(spec);
        esn::save_csv(gen_out, series);
        double lo = series.values[0], hi = series.values[0], sum = 0.0;
        for (double v : series.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        std::printf("%s: n=%zu min=%g max=%g mean=%g -> %s\n", series.name.c_str(),
                    series.size(), lo, hi, sum / static_cast<double>(series.size()),
                    gen_out.c_str());
        return 0;
    }

    if (run->parsed()) {
        esn::ExperimentConfig config = esn::parse_experiment_config(run_config);
        if (seed_set) config.seed = seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads > 1) config.threads = threads;
        esn::MetricsReport report = esn::run_experiment(config);
        std::size_t diverged = 0;
        for (const auto& row : report.rows) {
            if (row.diverged_at) ++diverged;
        }
        std::printf("%zu runs, %zu diverged; report in %s\n", report.rows.size(), diverged,
                    config.out_dir.c_str());
        for (const auto& s : report.aggregates) {
            std::printf("  %-20s median mse %-12g (%zu/%zu diverged)\n", s.label.c_str(),
                        s.median_mse, s.diverged, s.runs);
        }
        if (strict && diverged > 0) return 2;
        return 0;
    }

    if (train->parsed()) {
        esn::ExperimentConfig config = esn::parse_experiment_config(train_config);
        if (seed_set) config.seed = seed;
        esn::TimeSeries series = esn::build_dataset(config.dataset);
        if (config.preprocess) {
            std::size_t train_block = config.split_spec.washout_len + config.split_spec.train_len;
            esn::TimeSeries fit_part{series.name,
                                     std::vector<double>(series.values.begin(),
                                                         series.values.begin() +
                                                             std::min(train_block, series.size()))};
            auto pp = esn::Preprocess::fit(*config.preprocess, fit_part);
            series = pp.apply(series);
        }
        auto [train_part, test_part] = esn::split(series, config.split_spec);
        (void)test_part;
        esn::EsnConfig esn_config = config.esn;
        esn_config.master_seed = config.seed;
        esn::EsnModel model = esn::train_readout(esn::init_esn(esn_config), train_part);
        esn::save_model(model, model_out);
        std::printf("trained n_res=%zu on %zu samples -> %s\n", esn_config.n_res,
                    train_part.size(), model_out.c_str());
        return 0;
    }

    if (predict->parsed()) {
        esn::EsnModel model = esn::load_model(model_path);
        esn::TimeSeries prediction{"prediction", {}};
        if (predict_mode == "generative") {
            prediction.values = esn::predict_generative(model, steps).values;
        } else if (predict_mode == "guided") {
            if (inputs_path.empty()) throw esn::UsageError("predict: guided mode needs --inputs");
            esn::TimeSeries inputs = esn::load_csv(inputs_path);
            prediction.values = esn::predict_guided(model, inputs).values;
        } else {
            throw esn::UsageError("predict: unknown mode '" + predict_mode + "'");
        }
        esn::save_csv(predict_out, prediction);
        std::printf("%zu predictions -> %s\n", prediction.size(), predict_out.c_str());
        return 0;
    }

    if (merge->parsed()) {
        std::string dir = out_dir.empty() ? "merged" : out_dir;
        esn::MetricsReport merged = esn::merge_reports(merge_inputs, dir);
        std::printf("merged %zu rows from %zu files -> %s\n", merged.rows.size(),
                    merge_inputs.size(), dir.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--strict") strict = true;
    }
    try {
        return run_cli(argc, argv);
    } catch (const esn::DivergedError& e) {
        std::fprintf(stderr, "diverged: %s\n", e.what());
        return strict ? 2 : 0;
    } catch (const esn::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
