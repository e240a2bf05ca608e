#include "esn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "esn/errors.hpp"
#include "esn/parallel.hpp"
#include "esn/textio.hpp"

namespace esn {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------
// Config file parsing: ini-style sections of `key = value`, '#' comments.

struct RawConfig {
    // section -> key -> (value, seen)
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string path;

    std::optional<std::string> get(const std::string& section, const std::string& key) {
        auto s = sections.find(section);
        if (s == sections.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        consumed[section + "." + key] = true;
        return k->second;
    }
    std::map<std::string, bool> consumed;

    void check_all_consumed() const {
        for (const auto& [section, keys] : sections) {
            for (const auto& [key, value] : keys) {
                if (!consumed.count(section + "." + key)) {
                    throw ConfigError("unknown config key", section + "." + key);
                }
            }
        }
    }
};

RawConfig read_raw_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file", path);
    RawConfig raw;
    raw.path = path;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw IoError("config: empty section name", path, lineno);
            raw.sections[section];
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw IoError("config: expected 'key = value'", path, lineno);
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (section.empty()) throw IoError("config: key outside any section", path, lineno);
        if (key.empty()) throw IoError("config: empty key", path, lineno);
        raw.sections[section][key] = value;
    }
    return raw;
}

double number_value(const std::string& value, const std::string& where) {
    auto v = parse_double(value);
    if (!v) throw ConfigError("expected a number, got '" + value + "'", where);
    return *v;
}

std::size_t count_value(const std::string& value, const std::string& where) {
    double v = number_value(value, where);
    if (v < 0 || v != std::floor(v)) {
        throw ConfigError("expected a nonnegative integer, got '" + value + "'", where);
    }
    return static_cast<std::size_t>(v);
}

bool bool_value(const std::string& value, const std::string& where) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("expected true/false, got '" + value + "'", where);
}

// The four laws compared in the distribution grid, in report order.
const std::vector<std::pair<std::string, WeightSpec>>& distribution_grid() {
    static const std::vector<std::pair<std::string, WeightSpec>> grid = {
        {"uniform", WeightSpec::preset_uniform()},
        {"gaussian-a", WeightSpec::preset_gaussian_same_variance()},
        {"gaussian-b", WeightSpec::preset_gaussian_same_range()},
        {"arcsine", WeightSpec::preset_arcsine()},
    };
    return grid;
}

struct CellOutcome {
    ReportRow row;
    TimeSeries prediction;  // empty when diverged
    bool have_prediction = false;
};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (repeats < 1) throw ConfigError("repeats must be >= 1", "run.repeats");
    if (horizon < 1) throw ConfigError("horizon must be >= 1", "run.horizon");
    if (horizon > split_spec.test_len) {
        throw ConfigError("horizon exceeds test length", "run.horizon");
    }
    if (compare_distributions && ensemble) {
        throw ConfigError("compare_distributions and ensemble cannot be combined",
                          "run.compare_distributions");
    }
    if (dataset.kind == DatasetSpec::Kind::Csv && dataset.path.empty()) {
        throw ConfigError("csv dataset needs a path", "dataset.path");
    }
    if (ensemble) {
        if (ensemble->members < 1) throw ConfigError("members must be >= 1", "ensemble.members");
        if (!ensemble->m_grid.empty() && ensemble->folds < 2) {
            throw ConfigError("folds must be >= 2 when m_grid is set", "ensemble.folds");
        }
    }
    esn.validate();
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    RawConfig raw = read_raw_config(path);
    ExperimentConfig config;

    if (auto v = raw.get("dataset", "kind")) {
        if (*v == "mg") config.dataset.kind = DatasetSpec::Kind::Mg;
        else if (*v == "arma") config.dataset.kind = DatasetSpec::Kind::Arma;
        else if (*v == "sine") config.dataset.kind = DatasetSpec::Kind::Sine;
        else if (*v == "csv") config.dataset.kind = DatasetSpec::Kind::Csv;
        else throw ConfigError("unknown dataset kind '" + *v + "'", "dataset.kind");
    }
    if (auto v = raw.get("dataset", "n")) config.dataset.n = count_value(*v, "dataset.n");
    if (auto v = raw.get("dataset", "seed")) {
        config.dataset.seed = static_cast<std::uint64_t>(count_value(*v, "dataset.seed"));
    }
    if (auto v = raw.get("dataset", "trend")) config.dataset.trend = bool_value(*v, "dataset.trend");
    if (auto v = raw.get("dataset", "noise_scale")) {
        config.dataset.noise_scale = number_value(*v, "dataset.noise_scale");
    }
    if (auto v = raw.get("dataset", "path")) config.dataset.path = *v;
    if (auto v = raw.get("dataset", "tau")) config.dataset.mg.tau = number_value(*v, "dataset.tau");
    if (auto v = raw.get("dataset", "a_num")) {
        config.dataset.mg.a_num = number_value(*v, "dataset.a_num");
    }
    if (auto v = raw.get("dataset", "b_lin")) {
        config.dataset.mg.b_lin = number_value(*v, "dataset.b_lin");
    }
    if (auto v = raw.get("dataset", "exponent")) {
        config.dataset.mg.exponent = number_value(*v, "dataset.exponent");
    }
    if (auto v = raw.get("dataset", "dt")) config.dataset.mg.dt = number_value(*v, "dataset.dt");
    if (auto v = raw.get("dataset", "stride")) {
        config.dataset.mg.stride = count_value(*v, "dataset.stride");
    }
    if (auto v = raw.get("dataset", "history")) {
        config.dataset.mg.history = number_value(*v, "dataset.history");
    }

    if (auto v = raw.get("preprocess", "kind")) {
        if (*v == "none") config.preprocess.reset();
        else if (*v == "cubitize") config.preprocess = PreprocessKind::Cubitize;
        else if (*v == "standardize") config.preprocess = PreprocessKind::Standardize;
        else if (*v == "unitize") config.preprocess = PreprocessKind::Unitize;
        else throw ConfigError("unknown preprocess kind '" + *v + "'", "preprocess.kind");
    }

    if (auto v = raw.get("split", "washout")) {
        config.split_spec.washout_len = count_value(*v, "split.washout");
    }
    if (auto v = raw.get("split", "train")) {
        config.split_spec.train_len = count_value(*v, "split.train");
    }
    if (auto v = raw.get("split", "test")) {
        config.split_spec.test_len = count_value(*v, "split.test");
    }

    try {
        if (auto v = raw.get("esn", "n_res")) config.esn.n_res = count_value(*v, "esn.n_res");
        if (auto v = raw.get("esn", "w_in")) config.esn.w_in_spec = WeightSpec::parse(*v);
        if (auto v = raw.get("esn", "w")) config.esn.w_spec = WeightSpec::parse(*v);
        if (auto v = raw.get("esn", "input_scaling")) {
            config.esn.input_scaling = number_value(*v, "esn.input_scaling");
        }
        if (auto v = raw.get("esn", "density")) {
            config.esn.density = number_value(*v, "esn.density");
        }
        if (auto v = raw.get("esn", "rho")) config.esn.rho = number_value(*v, "esn.rho");
        if (auto v = raw.get("esn", "alpha")) config.esn.alpha = AlphaMode::parse(*v);
        if (auto v = raw.get("esn", "state_noise")) {
            config.esn.state_noise = StateNoise::parse(*v);
        }
        if (auto v = raw.get("esn", "init_state")) {
            config.esn.init_state = InitStateSpec::parse(*v);
        }
        if (auto v = raw.get("esn", "feedback")) {
            config.esn.feedback_enabled = bool_value(*v, "esn.feedback");
        }
        if (auto v = raw.get("esn", "beta")) config.esn.beta = number_value(*v, "esn.beta");
    } catch (const UsageError& e) {
        throw ConfigError(e.what(), "esn");
    }

    if (auto v = raw.get("run", "mode")) {
        if (*v == "generative") config.mode = RunMode::Generative;
        else if (*v == "guided") config.mode = RunMode::Guided;
        else throw ConfigError("unknown mode '" + *v + "'", "run.mode");
    }
    if (auto v = raw.get("run", "horizon")) config.horizon = count_value(*v, "run.horizon");
    if (auto v = raw.get("run", "repeats")) config.repeats = count_value(*v, "run.repeats");
    if (auto v = raw.get("run", "seed")) {
        config.seed = static_cast<std::uint64_t>(count_value(*v, "run.seed"));
    }
    if (auto v = raw.get("run", "compare_distributions")) {
        config.compare_distributions = bool_value(*v, "run.compare_distributions");
    }
    if (auto v = raw.get("run", "out_dir")) config.out_dir = *v;
    if (auto v = raw.get("run", "threads")) config.threads = count_value(*v, "run.threads");

    if (raw.sections.count("ensemble")) {
        EnsembleSpec spec;
        if (auto v = raw.get("ensemble", "kind")) {
            if (*v == "bagging") spec.kind = EnsembleKind::Bagging;
            else if (*v == "perturbation") spec.kind = EnsembleKind::Perturbation;
            else throw ConfigError("unknown ensemble kind '" + *v + "'", "ensemble.kind");
        }
        if (auto v = raw.get("ensemble", "members")) {
            spec.members = count_value(*v, "ensemble.members");
        }
        if (auto v = raw.get("ensemble", "on_diverged")) {
            if (*v == "fail") spec.on_diverged = DivergedPolicy::Fail;
            else if (*v == "drop") spec.on_diverged = DivergedPolicy::DropAndRenormalize;
            else throw ConfigError("unknown policy '" + *v + "'", "ensemble.on_diverged");
        }
        if (auto v = raw.get("ensemble", "m_grid")) {
            std::stringstream ss(*v);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (trim(tok).empty()) continue;
                spec.m_grid.push_back(count_value(trim(tok), "ensemble.m_grid"));
            }
        }
        if (auto v = raw.get("ensemble", "folds")) {
            spec.folds = count_value(*v, "ensemble.folds");
        }
        config.ensemble = spec;
    }

    raw.check_all_consumed();
    config.esn.washout_len = config.split_spec.washout_len;
    config.validate();
    return config;
}

TimeSeries build_dataset(const DatasetSpec& spec) {
    switch (spec.kind) {
        case DatasetSpec::Kind::Mg: return mackey_glass(spec.n, spec.mg);
        case DatasetSpec::Kind::Arma:
            return gen_arma(spec.n, spec.trend, spec.seed, spec.noise_scale);
        case DatasetSpec::Kind::Sine: return gen_sine(spec.n, spec.trend);
        case DatasetSpec::Kind::Csv: return load_csv(spec.path);
    }
    throw UsageError("build_dataset: unknown kind");
}

namespace {

// ---------------------------------------------------------------------
// Cells

struct Frame {
    TimeSeries train;
    TimeSeries test;
    TimeSeries target;         // first `horizon` test values
    TimeSeries guided_inputs;  // train.back() followed by test prefix
};

Frame make_frame(const ExperimentConfig& config, const TimeSeries& series) {
    Frame f;
    auto [train, test] = split(series, config.split_spec);
    f.train = std::move(train);
    f.test = std::move(test);
    f.target = TimeSeries{"target",
                          std::vector<double>(f.test.values.begin(),
                                              f.test.values.begin() + config.horizon)};
    std::vector<double> gi;
    gi.reserve(config.horizon);
    gi.push_back(f.train.values.back());
    gi.insert(gi.end(), f.test.values.begin(), f.test.values.begin() + (config.horizon - 1));
    f.guided_inputs = TimeSeries{"guided_inputs", std::move(gi)};
    return f;
}

void fill_metrics(ReportRow& row, const TimeSeries& prediction, const TimeSeries& target) {
    row.mse_value = mse(prediction, target);
    row.mae_value = mae(prediction, target);
    row.rmse_value = rmse(prediction, target);
}

CellOutcome run_single_cell(const ExperimentConfig& config, const Frame& frame,
                            const std::string& label, std::uint64_t seed,
                            const WeightSpec& w_in_spec, const WeightSpec& w_spec) {
    CellOutcome out;
    out.row.label = label;
    out.row.seed = seed;
    EsnConfig esn_config = config.esn;
    esn_config.master_seed = seed;
    esn_config.w_in_spec = w_in_spec;
    esn_config.w_spec = w_spec;
    try {
        EsnModel model = train_readout(init_esn(esn_config), frame.train);
        out.prediction = config.mode == RunMode::Generative
                             ? predict_generative(model, config.horizon)
                             : predict_guided(model, frame.guided_inputs);
        out.have_prediction = true;
        fill_metrics(out.row, out.prediction, frame.target);
    } catch (const DivergedError& e) {
        out.row.diverged_at = e.step();
    }
    return out;
}

CellOutcome run_ensemble_cell(const ExperimentConfig& config, const Frame& frame,
                              const std::string& label, std::uint64_t seed,
                              std::size_t members) {
    CellOutcome out;
    out.row.label = label;
    out.row.seed = seed;
    EsnConfig esn_config = config.esn;
    esn_config.master_seed = seed;
    const EnsembleSpec& spec = *config.ensemble;
    try {
        Ensemble e = spec.kind == EnsembleKind::Bagging
                         ? train_bagging_ensemble(esn_config, frame.train, members)
                         : train_perturbation_ensemble(esn_config, frame.train, members);
        EnsemblePrediction p =
            config.mode == RunMode::Generative
                ? predict_ensemble_generative(e, config.horizon, spec.on_diverged)
                : predict_ensemble_guided(e, frame.guided_inputs, spec.on_diverged);
        out.prediction = std::move(p.combined);
        out.have_prediction = true;
        fill_metrics(out.row, out.prediction, frame.target);
    } catch (const DivergedError& e) {
        out.row.diverged_at = e.step();
    }
    return out;
}

void write_tracking(const std::string& out_dir, const CellOutcome& cell,
                    const TimeSeries& target) {
    if (!cell.have_prediction) return;
    fs::path p = fs::path(out_dir) /
                 ("tracking_" + cell.row.label + "_" + std::to_string(cell.row.seed) + ".csv");
    std::ofstream out(p);
    if (!out) throw IoError("cannot open file for writing", p.string());
    out << "step,target,prediction\n";
    for (std::size_t i = 0; i < cell.prediction.size(); ++i) {
        out << (i + 1) << "," << format_g17(target.values[i]) << ","
            << format_g17(cell.prediction.values[i]) << "\n";
    }
}

std::vector<LabelStats> aggregate(const std::vector<ReportRow>& rows) {
    std::vector<LabelStats> stats;
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> mses;
    std::map<std::string, std::size_t> diverged, runs;
    for (const auto& row : rows) {
        if (!runs.count(row.label)) order.push_back(row.label);
        ++runs[row.label];
        if (row.diverged_at) ++diverged[row.label];
        else if (row.mse_value) mses[row.label].push_back(*row.mse_value);
    }
    for (const auto& label : order) {
        LabelStats s;
        s.label = label;
        s.runs = runs[label];
        s.diverged = diverged.count(label) ? diverged[label] : 0;
        const auto& v = mses[label];
        if (!v.empty()) {
            s.median_mse = median_of(v);
            s.mean_mse = compensated_sum(v) / static_cast<double>(v.size());
            if (v.size() > 1) {
                double acc = 0.0;
                for (double x : v) acc += (x - s.mean_mse) * (x - s.mean_mse);
                s.std_mse = std::sqrt(acc / static_cast<double>(v.size() - 1));
            }
        }
        stats.push_back(s);
    }
    return stats;
}

std::string csv_field(const std::optional<double>& v) { return v ? format_g17(*v) : ""; }

}  // namespace

void write_report_files(const MetricsReport& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.csv");
        if (!out) throw IoError("cannot open file for writing", out_dir + "/report.csv");
        out << "label,seed,mse,mae,rmse,diverged_at,reduction_pct\n";
        for (const auto& r : report.rows) {
            out << r.label << "," << r.seed << "," << csv_field(r.mse_value) << ","
                << csv_field(r.mae_value) << "," << csv_field(r.rmse_value) << ","
                << (r.diverged_at ? std::to_string(*r.diverged_at) : "") << ","
                << csv_field(r.reduction_pct) << "\n";
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "report.md");
        if (!out) throw IoError("cannot open file for writing", out_dir + "/report.md");
        out << "# Experiment report\n\n";
        if (report.chosen_members > 0) {
            out << "Members chosen by cross-validation: " << report.chosen_members << "\n\n";
        }
        out << "## Aggregates (MSE over non-diverged runs)\n\n";
        out << "| label | runs | diverged | median | mean | std |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto& s : report.aggregates) {
            out << "| " << s.label << " | " << s.runs << " | " << s.diverged << " | "
                << format_g4(s.median_mse) << " | " << format_g4(s.mean_mse) << " | "
                << format_g4(s.std_mse) << " |\n";
        }
        out << "\n## Runs\n\n";
        out << "| label | seed | mse | mae | rmse | diverged_at | reduction_pct |\n";
        out << "|---|---|---|---|---|---|---|\n";
        for (const auto& r : report.rows) {
            out << "| " << r.label << " | " << r.seed << " | "
                << (r.mse_value ? format_g4(*r.mse_value) : "-") << " | "
                << (r.mae_value ? format_g4(*r.mae_value) : "-") << " | "
                << (r.rmse_value ? format_g4(*r.rmse_value) : "-") << " | "
                << (r.diverged_at ? std::to_string(*r.diverged_at) : "-") << " | "
                << (r.reduction_pct ? format_g4(*r.reduction_pct) : "-") << " |\n";
        }
    }
}

MetricsReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    TimeSeries series = build_dataset(config.dataset);

    std::optional<Preprocess> pp;
    if (config.preprocess) {
        std::size_t train_block = config.split_spec.washout_len + config.split_spec.train_len;
        if (train_block > series.size()) {
            throw ConfigError("split exceeds dataset length", "split");
        }
        TimeSeries fit_part{series.name,
                            std::vector<double>(series.values.begin(),
                                                series.values.begin() + train_block)};
        pp = Preprocess::fit(*config.preprocess, fit_part);
        series = pp->apply(series);
    }

    Frame frame = make_frame(config, series);
    fs::create_directories(config.out_dir);

    MetricsReport report;

    std::size_t members = config.ensemble ? config.ensemble->members : 0;
    if (config.ensemble && !config.ensemble->m_grid.empty()) {
        EsnConfig cv_config = config.esn;
        cv_config.master_seed = config.seed;
        CvResult cv = select_m_cv(cv_config, frame.train, config.ensemble->m_grid,
                                  config.ensemble->folds, config.ensemble->kind);
        members = cv.chosen_m;
        report.cv_curve = cv.curve;
        report.chosen_members = members;
        std::ofstream out(fs::path(config.out_dir) / "cv_curve.csv");
        if (!out) throw IoError("cannot open file for writing", config.out_dir + "/cv_curve.csv");
        out << "members,cv_mse\n";
        for (const auto& [m, score] : cv.curve) out << m << "," << format_g17(score) << "\n";
    }

    // One cell per (label, repeat); cells fill preassigned slots so the
    // report is identical no matter how they are scheduled.
    struct CellSpec {
        std::string label;
        std::uint64_t seed;
        enum class Kind { Single, Distribution, Ensemble } kind;
        WeightSpec w_in, w;
    };
    std::vector<CellSpec> cells;
    for (std::size_t r = 0; r < config.repeats; ++r) {
        std::uint64_t seed = config.seed + r;
        if (config.compare_distributions) {
            for (const auto& [name, spec] : distribution_grid()) {
                cells.push_back({name, seed, CellSpec::Kind::Distribution, spec, spec});
            }
        } else if (config.ensemble) {
            cells.push_back(
                {"single", seed, CellSpec::Kind::Single, config.esn.w_in_spec, config.esn.w_spec});
            std::string label = config.ensemble->kind == EnsembleKind::Bagging
                                    ? "ensemble-bagging"
                                    : "ensemble-perturbation";
            cells.push_back(
                {label, seed, CellSpec::Kind::Ensemble, config.esn.w_in_spec, config.esn.w_spec});
        } else {
            cells.push_back(
                {"esn", seed, CellSpec::Kind::Single, config.esn.w_in_spec, config.esn.w_spec});
        }
    }

    std::vector<CellOutcome> outcomes(cells.size());
    parallel_for(cells.size(), config.threads, [&](std::size_t i) {
        const CellSpec& c = cells[i];
        outcomes[i] = c.kind == CellSpec::Kind::Ensemble
                          ? run_ensemble_cell(config, frame, c.label, c.seed, members)
                          : run_single_cell(config, frame, c.label, c.seed, c.w_in, c.w);
    });

    // Ensemble rows get the signed reduction against their paired single row.
    for (std::size_t i = 0; i + 1 < outcomes.size(); ++i) {
        if (cells[i].kind == CellSpec::Kind::Single && cells[i + 1].kind == CellSpec::Kind::Ensemble &&
            cells[i].seed == cells[i + 1].seed) {
            const auto& single = outcomes[i].row;
            auto& ens = outcomes[i + 1].row;
            if (single.mse_value && ens.mse_value && *single.mse_value > 0.0) {
                ens.reduction_pct = (1.0 - *ens.mse_value / *single.mse_value) * 100.0;
            }
        }
    }

    for (auto& cell : outcomes) {
        write_tracking(config.out_dir, cell, frame.target);
        report.rows.push_back(std::move(cell.row));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                         if (a.label != b.label) return a.label < b.label;
                         return a.seed < b.seed;
                     });
    report.aggregates = aggregate(report.rows);
    write_report_files(report, config.out_dir);
    return report;
}

std::vector<ReportRow> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file", path);
    std::vector<ReportRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (lineno == 1 && t.rfind("label,", 0) == 0) continue;  // header
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        while (fields.size() < 7) fields.push_back("");
        ReportRow row;
        row.label = fields[0];
        try {
            row.seed = std::stoull(fields[1]);
        } catch (const std::exception&) {
            throw IoError("report: bad seed '" + fields[1] + "'", path, lineno);
        }
        auto opt = [&](const std::string& f) -> std::optional<double> {
            if (trim(f).empty()) return std::nullopt;
            auto v = parse_double(f);
            if (!v) throw IoError("report: bad number '" + f + "'", path, lineno);
            return v;
        };
        row.mse_value = opt(fields[2]);
        row.mae_value = opt(fields[3]);
        row.rmse_value = opt(fields[4]);
        if (!trim(fields[5]).empty()) {
            row.diverged_at = static_cast<std::size_t>(std::stoull(fields[5]));
        }
        row.reduction_pct = opt(fields[6]);
        rows.push_back(std::move(row));
    }
    return rows;
}

MetricsReport merge_reports(const std::vector<std::string>& csv_paths,
                            const std::string& out_dir) {
    if (csv_paths.empty()) throw UsageError("report-merge: no input files");
    MetricsReport merged;
    for (const auto& path : csv_paths) {
        auto rows = read_report_csv(path);
        merged.rows.insert(merged.rows.end(), rows.begin(), rows.end());
    }
    std::stable_sort(merged.rows.begin(), merged.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                         if (a.label != b.label) return a.label < b.label;
                         return a.seed < b.seed;
                     });
    merged.aggregates = aggregate(merged.rows);
    write_report_files(merged, out_dir);
    return merged;
}

}  // namespace esn
