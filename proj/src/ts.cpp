#include "esn/ts.hpp"

#include <cmath>

#include "esn/errors.hpp"

namespace esn {

namespace {

void require_comparable(const TimeSeries& y, const TimeSeries& t) {
    if (y.size() != t.size()) {
        throw UsageError("metric: series lengths differ (" + std::to_string(y.size()) + " vs " +
                         std::to_string(t.size()) + ")");
    }
    if (y.size() == 0) throw UsageError("metric: empty series");
    validate_series(y);
    validate_series(t);
}

class KahanAccumulator {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace

TimeSeries make_series(std::string name, std::vector<double> values) {
    TimeSeries s{std::move(name), std::move(values)};
    validate_series(s);
    return s;
}

void validate_series(const TimeSeries& s) {
    if (s.values.empty()) throw UsageError("series '" + s.name + "': empty");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) {
            throw UsageError("series '" + s.name + "': non-finite value at index " +
                             std::to_string(i));
        }
    }
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec) {
    validate_series(series);
    if (spec.washout_len >= spec.train_len) {
        throw UsageError("split: washout_len (" + std::to_string(spec.washout_len) +
                         ") must be < train_len (" + std::to_string(spec.train_len) + ")");
    }
    std::size_t need = spec.washout_len + spec.train_len + spec.test_len;
    if (need > series.size()) {
        throw UsageError("split: washout+train+test (" + std::to_string(need) +
                         ") exceeds series length (" + std::to_string(series.size()) + ")");
    }
    std::size_t cut = spec.washout_len + spec.train_len;
    TimeSeries train{series.name + "_train",
                     std::vector<double>(series.values.begin(), series.values.begin() + cut)};
    TimeSeries test{series.name + "_test",
                    std::vector<double>(series.values.begin() + cut,
                                        series.values.begin() + cut + spec.test_len)};
    return {std::move(train), std::move(test)};
}

double mse(const TimeSeries& y, const TimeSeries& t) {
    require_comparable(y, t);
    KahanAccumulator acc;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y.values[i] - t.values[i];
        acc.add(d * d);
    }
    return acc.value() / static_cast<double>(y.size());
}

double mae(const TimeSeries& y, const TimeSeries& t) {
    require_comparable(y, t);
    KahanAccumulator acc;
    for (std::size_t i = 0; i < y.size(); ++i) acc.add(std::abs(y.values[i] - t.values[i]));
    return acc.value() / static_cast<double>(y.size());
}

double rmse(const TimeSeries& y, const TimeSeries& t) { return std::sqrt(mse(y, t)); }

double error_reduction(double e_single, double e_ensemble) {
    if (!(e_single > 0.0) || !std::isfinite(e_single)) {
        throw UsageError("error_reduction: single-model error must be positive and finite");
    }
    if (!std::isfinite(e_ensemble)) {
        throw UsageError("error_reduction: ensemble error must be finite");
    }
    return std::abs((e_ensemble - e_single) / e_single) * 100.0;
}

double compensated_sum(const std::vector<double>& xs) {
    KahanAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace esn
