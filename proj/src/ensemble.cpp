#include "esn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "esn/errors.hpp"
#include "esn/rng.hpp"
#include "esn/textio.hpp"

namespace esn {

namespace {

constexpr double kWeightSumTol = 1e-12;

template <typename Fn>
auto with_member_context(std::size_t m, Fn&& fn) {
    try {
        return fn();
    } catch (const DivergedError& e) {
        throw DivergedError("member " + std::to_string(m) + ": " + e.what(), e.step());
    } catch (const SingularError& e) {
        throw SingularError("member " + std::to_string(m) + ": " + e.what(), e.pivot());
    } catch (const Error& e) {
        throw Error("member " + std::to_string(m) + ": " + e.what());
    }
}

EsnConfig config_for_member(const EsnConfig& config, std::size_t m) {
    EsnConfig c = config;
    c.master_seed = member_seed(config.master_seed, m);
    return c;
}

EnsemblePrediction combine(const Ensemble& e, std::vector<TimeSeries> outputs,
                           std::vector<std::size_t> dropped, std::size_t len) {
    EnsemblePrediction p;
    p.member_outputs = std::move(outputs);
    p.dropped_members = std::move(dropped);
    p.applied_weights = e.weights;

    if (!p.dropped_members.empty()) {
        double remaining = 0.0;
        for (std::size_t m = 0; m < e.size(); ++m) p.applied_weights[m] = e.weights[m];
        for (std::size_t m : p.dropped_members) p.applied_weights[m] = 0.0;
        for (double w : p.applied_weights) remaining += w;
        if (remaining <= 0.0) {
            throw DivergedError("predict_ensemble: every member diverged");
        }
        for (double& w : p.applied_weights) w /= remaining;
    }

    std::vector<double> acc(len, 0.0);
    for (std::size_t m = 0; m < e.size(); ++m) {
        if (p.applied_weights[m] == 0.0) continue;
        const auto& vals = p.member_outputs[m].values;
        for (std::size_t i = 0; i < len; ++i) acc[i] += p.applied_weights[m] * vals[i];
    }
    p.combined = TimeSeries{"ensemble", std::move(acc)};
    return p;
}

template <typename PredictFn>
EnsemblePrediction predict_impl(const Ensemble& e, std::size_t len, DivergedPolicy policy,
                                PredictFn&& predict) {
    e.validate();
    for (const auto& m : e.members) {
        if (!m.trained()) throw UsageError("predict_ensemble: untrained member");
    }
    std::vector<TimeSeries> outputs(e.size());
    std::vector<std::size_t> dropped;
    for (std::size_t m = 0; m < e.size(); ++m) {
        try {
            outputs[m] = predict(e.members[m]);
        } catch (const DivergedError& err) {
            if (policy == DivergedPolicy::Fail) {
                throw DivergedError("member " + std::to_string(m) + ": " + err.what(),
                                    err.step());
            }
            dropped.push_back(m);
        }
    }
    return combine(e, std::move(outputs), std::move(dropped), len);
}

}  // namespace

void Ensemble::validate() const {
    if (members.empty()) throw UsageError("ensemble: needs at least one member");
    if (weights.size() != members.size()) {
        throw UsageError("ensemble: weight count does not match member count");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw UsageError("ensemble: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol) {
        throw UsageError("ensemble: weights must sum to 1");
    }
}

std::uint64_t member_seed(std::uint64_t master_seed, std::size_t member_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(member_index));
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng) {
    if (n == 0) throw UsageError("bootstrap_indices: empty source");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) {
        i = std::min<std::size_t>(n - 1, static_cast<std::size_t>(rng.uniform01() *
                                                                  static_cast<double>(n)));
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

double unique_fraction(const std::vector<std::size_t>& indices) {
    if (indices.empty()) return 0.0;
    std::size_t uniques = 1;
    for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i] != indices[i - 1]) ++uniques;  // indices are sorted
    }
    return static_cast<double>(uniques) / static_cast<double>(indices.size());
}

Ensemble train_perturbation_ensemble(const EsnConfig& config, const TimeSeries& series,
                                     std::size_t m_members) {
    if (m_members < 1) throw UsageError("train_perturbation_ensemble: m_members must be >= 1");
    Ensemble e;
    e.kind = EnsembleKind::Perturbation;
    e.members.reserve(m_members);
    for (std::size_t m = 0; m < m_members; ++m) {
        e.members.push_back(with_member_context(m, [&] {
            return train_readout(init_esn(config_for_member(config, m)), series);
        }));
    }
    e.weights.assign(m_members, 1.0 / static_cast<double>(m_members));
    return e;
}

EsnModel train_bagging_member(const EsnConfig& member_config, const TimeSeries& series,
                              const std::vector<std::size_t>& indices) {
    EsnModel model = init_esn(member_config);
    HarvestResult h = harvest_states(model, series);
    const std::size_t t_cols = h.s.cols();
    if (indices.empty()) throw UsageError("train_bagging_member: empty index set");
    for (std::size_t i : indices) {
        if (i >= t_cols) throw UsageError("train_bagging_member: index out of range");
    }
    Matrix sb(h.s.rows(), indices.size());
    Matrix yb(1, indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        for (std::size_t r = 0; r < h.s.rows(); ++r) sb(r, c) = h.s(r, indices[c]);
        yb(0, c) = h.targets(0, indices[c]);
    }
    model.w_out = ridge_solve(sb, yb, member_config.beta);
    model.last_state = std::move(h.final_state);
    model.last_input = std::move(h.final_input);
    return model;
}

Ensemble train_bagging_ensemble(const EsnConfig& config, const TimeSeries& series,
                                std::size_t m_members) {
    if (m_members < 1) throw UsageError("train_bagging_ensemble: m_members must be >= 1");
    Ensemble e;
    e.kind = EnsembleKind::Bagging;
    e.members.reserve(m_members);
    for (std::size_t m = 0; m < m_members; ++m) {
        e.members.push_back(with_member_context(m, [&] {
            EsnConfig member_config = config_for_member(config, m);
            // Resample size equals the regression sample count (n' = n).
            std::size_t t_cols = series.size() - 1 - config.washout_len;
            RngStream boot(member_config.master_seed, streams::kBootstrap);
            return train_bagging_member(member_config, series, bootstrap_indices(t_cols, boot));
        }));
    }
    e.weights.assign(m_members, 1.0 / static_cast<double>(m_members));
    return e;
}

EnsemblePrediction predict_ensemble_generative(const Ensemble& e, std::size_t n_steps,
                                               DivergedPolicy policy) {
    return predict_impl(e, n_steps, policy,
                        [&](const EsnModel& m) { return predict_generative(m, n_steps); });
}

EnsemblePrediction predict_ensemble_guided(const Ensemble& e, const TimeSeries& inputs,
                                           DivergedPolicy policy) {
    return predict_impl(e, inputs.size(), policy,
                        [&](const EsnModel& m) { return predict_guided(m, inputs); });
}

CvResult select_m_cv(const EsnConfig& config, const TimeSeries& series,
                     std::vector<std::size_t> m_grid, std::size_t folds, EnsembleKind kind) {
    if (m_grid.empty()) throw UsageError("select_m_cv: empty grid");
    if (folds < 2) throw UsageError("select_m_cv: folds must be >= 2");
    std::sort(m_grid.begin(), m_grid.end());
    m_grid.erase(std::unique(m_grid.begin(), m_grid.end()), m_grid.end());
    for (std::size_t m : m_grid) {
        if (m < 1) throw UsageError("select_m_cv: grid entries must be >= 1");
    }

    // folds+1 consecutive blocks; fold i trains on the prefix of i+1 blocks
    // and validates on the next block.
    std::size_t block = series.size() / (folds + 1);
    if (block < 1) throw UsageError("select_m_cv: series too short for fold count");
    for (std::size_t f = 0; f < folds; ++f) {
        std::size_t prefix = (f + 1) * block;
        if (prefix < config.washout_len + 2) {
            throw UsageError("select_m_cv: training prefix shorter than washout");
        }
    }

    CvResult result;
    result.curve.reserve(m_grid.size());
    for (std::size_t m : m_grid) {
        double total = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            std::size_t prefix = (f + 1) * block;
            std::size_t val_len = std::min(block, series.size() - prefix);
            TimeSeries train_part{series.name + "_cv",
                                  std::vector<double>(series.values.begin(),
                                                      series.values.begin() + prefix)};
            TimeSeries val_part{series.name + "_val",
                                std::vector<double>(series.values.begin() + prefix,
                                                    series.values.begin() + prefix + val_len)};
            Ensemble e = kind == EnsembleKind::Bagging
                             ? train_bagging_ensemble(config, train_part, m)
                             : train_perturbation_ensemble(config, train_part, m);
            // Score the estimator as deployed: diverged members are dropped,
            // and only a fully diverged prediction scores infinity.
            double fold_mse;
            try {
                auto pred =
                    predict_ensemble_generative(e, val_len, DivergedPolicy::DropAndRenormalize);
                fold_mse = mse(pred.combined, val_part);
            } catch (const DivergedError&) {
                fold_mse = std::numeric_limits<double>::infinity();
            }
            total += fold_mse;
        }
        result.curve.emplace_back(m, total / static_cast<double>(folds));
    }

    result.chosen_m = result.curve.front().first;
    double best = result.curve.front().second;
    for (const auto& [m, score] : result.curve) {
        if (score < best) {  // strict: ties keep the smaller M
            best = score;
            result.chosen_m = m;
        }
    }
    return result;
}

void save_ensemble(const Ensemble& e, const std::string& manifest_path) {
    e.validate();
    namespace fs = std::filesystem;
    fs::path manifest(manifest_path);
    fs::path dir = manifest.parent_path();
    std::string stem = manifest.stem().string();

    std::ofstream out(manifest_path);
    if (!out) throw IoError("cannot open file for writing", manifest_path);
    out << "kind " << (e.kind == EnsembleKind::Bagging ? "bagging" : "perturbation") << "\n";
    out << "members " << e.size() << "\n";
    for (std::size_t m = 0; m < e.size(); ++m) {
        std::string member_file = stem + "_member" + std::to_string(m) + ".esn";
        save_model(e.members[m], (dir / member_file).string());
        out << "member " << format_g17(e.weights[m]) << " " << member_file << "\n";
    }
    if (!out) throw IoError("write failed", manifest_path);
}

Ensemble load_ensemble(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open file", manifest_path);
    fs::path dir = fs::path(manifest_path).parent_path();

    Ensemble e;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::stringstream ss(t);
        std::string key;
        ss >> key;
        if (key == "kind") {
            std::string kind;
            ss >> kind;
            if (kind == "bagging") e.kind = EnsembleKind::Bagging;
            else if (kind == "perturbation") e.kind = EnsembleKind::Perturbation;
            else throw IoError("manifest: unknown kind '" + kind + "'", manifest_path, lineno);
        } else if (key == "members") {
            continue;  // informational
        } else if (key == "member") {
            std::string weight_tok, file;
            ss >> weight_tok >> file;
            auto w = parse_double(weight_tok);
            if (!w || file.empty()) {
                throw IoError("manifest: expected 'member <weight> <file>'", manifest_path,
                              lineno);
            }
            e.weights.push_back(*w);
            e.members.push_back(load_model((dir / file).string()));
        } else {
            throw IoError("manifest: unknown entry '" + key + "'", manifest_path, lineno);
        }
    }
    e.validate();
    return e;
}

}  // namespace esn
