// Copyright 2026 The sieval authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <ranges>
#include <stdexcept>
#include <vector>

#include "sieval/partition.hpp"
#include "sieval/raster.hpp"

namespace sieval {

template <typename R>
concept PixelRange = std::ranges::input_range<R> &&
                     std::convertible_to<std::ranges::range_value_t<R>, std::size_t>;

// Shared knobs for metric evaluation.
struct MetricConfig {
    double beta2 = 0.3;
    std::size_t threshold_count = 256;
    Connectivity connectivity = Connectivity::eight;
    std::uint8_t binarize_threshold = 128;
    AlphaMode alpha_mode = AlphaMode::separable();
    std::size_t min_area = 0;

    void validate() const {
        if (threshold_count < 2)
            throw std::invalid_argument("metric config: threshold_count must be >= 2");
        if (!(beta2 >= 0.0))
            throw std::invalid_argument("metric config: beta2 must be >= 0");
    }
};

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Confusion counts and derived scores at thresholds t_j = j / (T - 1),
// with the positive predicate pred >= t_j.
struct ThresholdSweep {
    std::vector<double> thresholds;
    std::vector<ConfusionCounts> counts;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f_beta;
    double beta2 = 0.3;

    std::size_t positives() const { return counts.empty() ? 0 : counts[0].tp + counts[0].fn; }
    std::size_t negatives() const { return counts.empty() ? 0 : counts[0].fp + counts[0].tn; }
};

inline double f_beta_score(const ConfusionCounts& c, double beta2) {
    const double tp = static_cast<double>(c.tp);
    const double denom = (1.0 + beta2) * tp + beta2 * static_cast<double>(c.fn) +
                         static_cast<double>(c.fp);
    return denom == 0.0 ? 0.0 : (1.0 + beta2) * tp / denom;
}

namespace detail {

// Largest level j in [0, T) with j / (T - 1) <= p. The estimate from
// p * (T - 1) is corrected with direct comparisons so the bucketed sweep
// matches a per-threshold pred >= t test bit for bit.
inline std::size_t threshold_level(double p, std::size_t threshold_count) {
    const double denom = static_cast<double>(threshold_count - 1);
    std::size_t j = 0;
    const double estimate = p * denom;
    if (estimate > 0.0)
        j = std::min<std::size_t>(threshold_count - 1, static_cast<std::size_t>(estimate));
    while (j + 1 < threshold_count && static_cast<double>(j + 1) / denom <= p) ++j;
    while (j > 0 && static_cast<double>(j) / denom > p) --j;
    return j;
}

}  // namespace detail

template <PixelRange R>
double region_mae(const SaliencyMap& pred, const BinaryMask& gt, R&& region) {
    require_same_extent(pred.extent(), gt.extent(), "region_mae");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i : region) {
        sum += std::abs(static_cast<double>(pred[i]) - static_cast<double>(gt[i]));
        ++n;
    }
    if (n == 0) throw std::invalid_argument("region_mae: empty region");
    return sum / static_cast<double>(n);
}

template <PixelRange R>
ThresholdSweep sweep(const SaliencyMap& pred, const BinaryMask& gt, R&& region,
                     const MetricConfig& config = {}) {
    require_same_extent(pred.extent(), gt.extent(), "sweep");
    config.validate();
    const std::size_t levels = config.threshold_count;

    std::vector<std::size_t> pos_hist(levels, 0);
    std::vector<std::size_t> neg_hist(levels, 0);
    std::size_t n = 0;
    for (std::size_t i : region) {
        const std::size_t level = detail::threshold_level(pred[i], levels);
        (gt.is_salient(i) ? pos_hist : neg_hist)[level] += 1;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("sweep: empty region");

    ThresholdSweep out;
    out.beta2 = config.beta2;
    out.thresholds.resize(levels);
    out.counts.resize(levels);
    out.precision.resize(levels);
    out.recall.resize(levels);
    out.f_beta.resize(levels);

    std::size_t positives = 0, negatives = 0;
    for (std::size_t j = 0; j < levels; ++j) {
        positives += pos_hist[j];
        negatives += neg_hist[j];
    }

    // pred >= t_j holds exactly for pixels bucketed at level j or above.
    std::size_t tp = 0, fp = 0;
    for (std::size_t j = levels; j-- > 0;) {
        tp += pos_hist[j];
        fp += neg_hist[j];
        ConfusionCounts& c = out.counts[j];
        c.tp = tp;
        c.fp = fp;
        c.fn = positives - tp;
        c.tn = negatives - fp;
        out.thresholds[j] = static_cast<double>(j) / static_cast<double>(levels - 1);
        out.precision[j] = tp + fp == 0 ? 0.0
                                        : static_cast<double>(tp) / static_cast<double>(tp + fp);
        out.recall[j] = positives == 0 ? 0.0
                                       : static_cast<double>(tp) / static_cast<double>(positives);
        out.f_beta[j] = f_beta_score(c, config.beta2);
    }
    return out;
}

inline double mean_f(const ThresholdSweep& sweep) {
    if (sweep.f_beta.empty()) throw std::invalid_argument("mean_f: empty sweep");
    double sum = 0.0;
    for (double f : sweep.f_beta) sum += f;
    return sum / static_cast<double>(sweep.f_beta.size());
}

inline double max_f(const ThresholdSweep& sweep) {
    if (sweep.f_beta.empty()) throw std::invalid_argument("max_f: empty sweep");
    return *std::max_element(sweep.f_beta.begin(), sweep.f_beta.end());
}

// ROC area via the rank-sum statistic; ties between scores contribute half
// credit through midranks.
template <PixelRange R>
double auc_rank(const SaliencyMap& pred, const BinaryMask& gt, R&& region) {
    require_same_extent(pred.extent(), gt.extent(), "auc_rank");
    struct Sample {
        float score;
        bool positive;
    };
    std::vector<Sample> samples;
    for (std::size_t i : region) samples.push_back({pred[i], gt.is_salient(i)});

    std::size_t positives = 0;
    for (const Sample& s : samples) positives += s.positive;
    const std::size_t negatives = samples.size() - positives;
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument("auc_rank: region has a single class");

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.score < b.score; });

    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        std::size_t tied_positives = 0;
        while (j < samples.size() && samples[j].score == samples[i].score) {
            tied_positives += samples[j].positive;
            ++j;
        }
        const double midrank = static_cast<double>(i + 1 + j) / 2.0;
        positive_rank_sum += midrank * static_cast<double>(tied_positives);
        i = j;
    }

    const double np = static_cast<double>(positives);
    const double nn = static_cast<double>(negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

// ROC area by trapezoidal integration over the sweep's operating points,
// closed with the (0,0) and (1,1) endpoints.
inline double auc_trapezoid(const ThresholdSweep& sweep) {
    const std::size_t positives = sweep.positives();
    const std::size_t negatives = sweep.negatives();
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument("auc_trapezoid: region has a single class");

    double area = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    auto add_point = [&](double fpr, double tpr) {
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    };
    for (std::size_t j = sweep.counts.size(); j-- > 0;) {
        const ConfusionCounts& c = sweep.counts[j];
        add_point(static_cast<double>(c.fp) / static_cast<double>(negatives),
                  static_cast<double>(c.tp) / static_cast<double>(positives));
    }
    add_point(1.0, 1.0);
    return area;
}

template <PixelRange R>
double auc_trapezoid(const SaliencyMap& pred, const BinaryMask& gt, R&& region,
                     const MetricConfig& config = {}) {
    return auc_trapezoid(sweep(pred, gt, region, config));
}

// Enhanced-alignment measure over the whole image. The prediction is
// binarized at twice its mean (capped at 1) before alignment.
inline double e_measure(const SaliencyMap& pred, const BinaryMask& gt) {
    require_same_extent(pred.extent(), gt.extent(), "e_measure");
    const std::size_t n = pred.size();
    const double count = static_cast<double>(n);

    double pred_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) pred_mean += pred[i];
    pred_mean /= count;
    const double tau = std::min(2.0 * pred_mean, 1.0);

    std::size_t fm_ones = 0;
    for (std::size_t i = 0; i < n; ++i) fm_ones += pred[i] > tau;
    const std::size_t gt_ones = gt.salient_count();

    double sum = 0.0;
    if (gt_ones == 0) {
        for (std::size_t i = 0; i < n; ++i) sum += pred[i] > tau ? 0.0 : 1.0;
        return sum / count;
    }
    if (gt_ones == n) {
        return static_cast<double>(fm_ones) / count;
    }

    const double mu_fm = static_cast<double>(fm_ones) / count;
    const double mu_gt = static_cast<double>(gt_ones) / count;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi_gt = static_cast<double>(gt[i]) - mu_gt;
        const double phi_fm = (pred[i] > tau ? 1.0 : 0.0) - mu_fm;
        const double denom = phi_gt * phi_gt + phi_fm * phi_fm;
        const double xi = denom == 0.0 ? 0.0 : 2.0 * phi_gt * phi_fm / denom;
        const double aligned = 1.0 + xi;
        sum += aligned * aligned / 4.0;
    }
    return sum / count;
}

}  // namespace sieval
