#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esn/reservoir.hpp"
#include "esn/ts.hpp"

namespace esn {

enum class EnsembleKind { Perturbation, Bagging };

// What to do when a member's free-running prediction diverges.
enum class DivergedPolicy { Fail, DropAndRenormalize };

// M trained networks plus combination weights (uniform by default).
struct Ensemble {
    EnsembleKind kind = EnsembleKind::Perturbation;
    std::vector<EsnModel> members;
    std::vector<double> weights;  // nonnegative, summing to 1

    std::size_t size() const { return members.size(); }
    void validate() const;
};

// Seed given to member m. Member 0 keeps the master seed, so a one-member
// ensemble is exactly the plain model with the same config; further members
// get strongly mixed seeds.
std::uint64_t member_seed(std::uint64_t master_seed, std::size_t member_index);

// n draws with replacement from {0..n-1}, sorted ascending (time order).
std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng);

// Fraction of distinct indices in a bootstrap draw; ~ 1 - 1/e for large n.
double unique_fraction(const std::vector<std::size_t>& indices);

// Every member has fresh W_in and W (seeded per member) and is trained on
// the identical series. Uniform weights.
Ensemble train_perturbation_ensemble(const EsnConfig& config, const TimeSeries& series,
                                     std::size_t m_members);

// Per member: fresh reservoir weights, states harvested over the full
// series, then the readout is ridge-solved on a bootstrap resample of the
// post-washout regression columns (duplicates kept, indices in time order).
Ensemble train_bagging_ensemble(const EsnConfig& config, const TimeSeries& series,
                                std::size_t m_members);

// One bagging member with externally supplied regression-row indices;
// passing 0..T-1 reproduces plain training exactly.
EsnModel train_bagging_member(const EsnConfig& member_config, const TimeSeries& series,
                              const std::vector<std::size_t>& indices);

struct EnsemblePrediction {
    TimeSeries combined;
    std::vector<TimeSeries> member_outputs;   // empty entry for dropped members
    std::vector<double> applied_weights;      // renormalized when members dropped
    std::vector<std::size_t> dropped_members; // indices of diverged members
};

// Members predict independently (generative members feed back their own
// predictions); the combined output is the weighted average per step.
EnsemblePrediction predict_ensemble_generative(const Ensemble& e, std::size_t n_steps,
                                               DivergedPolicy policy = DivergedPolicy::Fail);
EnsemblePrediction predict_ensemble_guided(const Ensemble& e, const TimeSeries& inputs,
                                           DivergedPolicy policy = DivergedPolicy::Fail);

struct CvResult {
    std::size_t chosen_m = 0;
    // (M, average validation MSE over folds), in grid order after dedup.
    std::vector<std::pair<std::size_t, double>> curve;
};

// Forward-chaining cross-validation of the member count: the series is cut
// into folds+1 consecutive blocks; fold i trains an ensemble on blocks
// 0..i and scores a generative prediction of block i+1. A diverged
// validation prediction scores infinity for its fold. Ties break toward
// smaller M.
CvResult select_m_cv(const EsnConfig& config, const TimeSeries& series,
                     std::vector<std::size_t> m_grid, std::size_t folds,
                     EnsembleKind kind = EnsembleKind::Bagging);

// Manifest persistence: a text file listing member model files (written
// next to it) plus weights.
void save_ensemble(const Ensemble& e, const std::string& manifest_path);
Ensemble load_ensemble(const std::string& manifest_path);

}  // namespace esn
