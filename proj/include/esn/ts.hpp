#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace esn {

// An ordered sequence of finite real samples at an implicit unit time step.
// The universal currency between generators, networks and reports.
struct TimeSeries {
    std::string name;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

// Validating constructor: rejects empty series and non-finite samples.
TimeSeries make_series(std::string name, std::vector<double> values);

// Throws UsageError if the series violates the TimeSeries invariants.
void validate_series(const TimeSeries& s);

struct SplitSpec {
    std::size_t washout_len = 0;  // initial steps excluded from regression
    std::size_t train_len = 0;    // regression samples after washout
    std::size_t test_len = 0;
};

// train = values[0, washout + train_len); test = the following test_len
// values. The washout stays inside the training block so state warm-up and
// regression see one contiguous signal.
std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec);

// Error metrics. Equal lengths and finite values required; sums are
// compensated so magnitudes near 1e-6 survive T ~ thousands.
double mse(const TimeSeries& y, const TimeSeries& y_target);
double mae(const TimeSeries& y, const TimeSeries& y_target);
double rmse(const TimeSeries& y, const TimeSeries& y_target);

// |(e_ensemble - e_single) / e_single| * 100. A reduction when the ensemble
// error is the smaller one. e_single must be positive.
double error_reduction(double e_single, double e_ensemble);

// Kahan-compensated sum; used by the metrics, exposed for reuse.
double compensated_sum(const std::vector<double>& xs);

}  // namespace esn
