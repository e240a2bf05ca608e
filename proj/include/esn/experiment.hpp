#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esn/datasets.hpp"
#include "esn/ensemble.hpp"
#include "esn/reservoir.hpp"
#include "esn/ts.hpp"

namespace esn {

// Where the experiment data comes from: a generator or a CSV file.
struct DatasetSpec {
    enum class Kind { Mg, Arma, Sine, Csv };
    Kind kind = Kind::Mg;
    std::size_t n = 2600;
    std::uint64_t seed = 1;  // generator seed (arma); independent of run seed
    bool trend = false;      // arma / sine
    double noise_scale = 1.0;  // arma innovations multiplier
    MgParams mg;
    std::string path;  // csv
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Bagging;
    std::size_t members = 20;
    DivergedPolicy on_diverged = DivergedPolicy::Fail;
    std::vector<std::size_t> m_grid;  // non-empty: pick members by CV first
    std::size_t folds = 3;
};

enum class RunMode { Generative, Guided };

// Declarative experiment description; the config file mirrors these fields
// one-to-one (see README for the key reference).
struct ExperimentConfig {
    DatasetSpec dataset;
    std::optional<PreprocessKind> preprocess;
    SplitSpec split_spec{100, 2000, 500};
    EsnConfig esn;  // washout_len is taken from split_spec
    RunMode mode = RunMode::Generative;
    std::size_t horizon = 500;
    std::size_t repeats = 1;
    std::uint64_t seed = 1;  // base master seed; repeat r uses seed + r
    bool compare_distributions = false;
    std::optional<EnsembleSpec> ensemble;
    std::string out_dir = "out";
    std::size_t threads = 1;

    void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& path);

struct ReportRow {
    std::string label;
    std::uint64_t seed = 0;
    std::optional<double> mse_value;
    std::optional<double> mae_value;
    std::optional<double> rmse_value;
    std::optional<std::size_t> diverged_at;
    // Signed percentage (e_single - e_ensemble) / e_single * 100 on
    // ensemble rows when the paired single run is finite.
    std::optional<double> reduction_pct;
};

struct LabelStats {
    std::string label;
    std::size_t runs = 0;
    std::size_t diverged = 0;
    double median_mse = 0.0;  // over non-diverged rows
    double mean_mse = 0.0;
    double std_mse = 0.0;  // sample standard deviation
};

struct MetricsReport {
    std::vector<ReportRow> rows;          // ordered by (label, seed)
    std::vector<LabelStats> aggregates;   // label order of first appearance
    std::vector<std::pair<std::size_t, double>> cv_curve;  // when CV ran
    std::size_t chosen_members = 0;
};

// Runs the experiment and writes report.csv, report.md, one
// tracking_<label>_<seed>.csv per non-diverged cell, and cv_curve.csv when
// member-count CV is configured. Byte-identical across runs of the same
// config. Divergence is recorded per row, not thrown.
MetricsReport run_experiment(const ExperimentConfig& config);

// Builds the series a config describes (generator or CSV), before
// preprocessing.
TimeSeries build_dataset(const DatasetSpec& spec);

// Merges rows of several report.csv files, recomputes aggregates, and
// writes report.csv/report.md into out_dir.
MetricsReport merge_reports(const std::vector<std::string>& csv_paths,
                            const std::string& out_dir);

// Report (de)serialization helpers, shared by run and merge.
void write_report_files(const MetricsReport& report, const std::string& out_dir);
std::vector<ReportRow> read_report_csv(const std::string& path);

}  // namespace esn
