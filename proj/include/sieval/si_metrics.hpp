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

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sieval/metrics.hpp"
#include "sieval/partition.hpp"
#include "sieval/raster.hpp"

namespace sieval {

// Size-invariant MAE: the mean of per-frame MAEs plus the alpha-weighted
// background MAE, normalized by K + alpha. With no frames the whole image
// is background and the plain MAE is returned.
inline double si_mae(const SaliencyMap& pred, const BinaryMask& gt, const Partition& partition) {
    require_same_extent(pred.extent(), gt.extent(), "si_mae");
    require_same_extent(pred.extent(), partition.extent, "si_mae");
    if (partition.frames.empty()) return region_mae(pred, gt, all_pixels(pred.extent()));

    double sum = 0.0;
    for (const Frame& frame : partition.frames)
        sum += region_mae(pred, gt, frame_pixels(frame, partition.extent));
    if (partition.background_area > 0 && partition.alpha != 0.0)
        sum += partition.alpha * region_mae(pred, gt, background_pixels(partition));
    return sum / (static_cast<double>(partition.frames.size()) + partition.alpha);
}

enum class FVariant { mean, max };

// Aggregates one frame's sweep into a single F score. The t = 0 column is
// skipped: it marks every pixel positive, and inside an object frame that
// scores highly for any prediction, washing out the comparison.
inline double frame_f(const ThresholdSweep& sweep, FVariant variant) {
    if (sweep.f_beta.size() < 2) throw std::invalid_argument("frame_f: sweep too small");
    double best = 0.0, sum = 0.0;
    for (std::size_t j = 1; j < sweep.f_beta.size(); ++j) {
        best = std::max(best, sweep.f_beta[j]);
        sum += sweep.f_beta[j];
    }
    return variant == FVariant::max ? best
                                    : sum / static_cast<double>(sweep.f_beta.size() - 1);
}

// Size-invariant F: unweighted mean of per-frame F scores. The background
// frame carries no salient pixels and is excluded.
inline double si_f(const SaliencyMap& pred, const BinaryMask& gt, const Partition& partition,
                   FVariant variant, const MetricConfig& config = {}) {
    require_same_extent(pred.extent(), gt.extent(), "si_f");
    require_same_extent(pred.extent(), partition.extent, "si_f");
    if (partition.frames.empty()) throw std::invalid_argument("si_f: partition has no frames");

    double sum = 0.0;
    for (const Frame& frame : partition.frames)
        sum += frame_f(sweep(pred, gt, frame_pixels(frame, partition.extent), config), variant);
    return sum / static_cast<double>(partition.frames.size());
}

struct SiAucResult {
    std::optional<double> value;      // absent when every frame was excluded
    std::size_t excluded_frames = 0;  // frames whose box holds a single class
};

// Size-invariant AUC: unweighted mean of per-frame ROC areas. Frames whose
// box contains only one class have no ROC curve and are skipped; the count
// of skipped frames is reported alongside the mean.
inline SiAucResult si_auc(const SaliencyMap& pred, const BinaryMask& gt,
                          const Partition& partition) {
    require_same_extent(pred.extent(), gt.extent(), "si_auc");
    require_same_extent(pred.extent(), partition.extent, "si_auc");

    SiAucResult out;
    double sum = 0.0;
    std::size_t included = 0;
    for (const Frame& frame : partition.frames) {
        FramePixelRange box = frame_pixels(frame, partition.extent);
        std::size_t positives = 0;
        for (std::size_t i : box) positives += gt.is_salient(i);
        if (positives == 0 || positives == box.size()) {
            ++out.excluded_frames;
            continue;
        }
        sum += auc_rank(pred, gt, box);
        ++included;
    }
    if (included > 0) out.value = sum / static_cast<double>(included);
    return out;
}

// Whole-image scores of the classical metrics.
struct GlobalMetrics {
    double mae = 0.0;
    double f_mean = 0.0;
    double f_max = 0.0;
    std::optional<double> auc;  // absent when the image holds a single class
    double e = 0.0;
};

inline GlobalMetrics global_metrics(const SaliencyMap& pred, const BinaryMask& gt,
                                    const MetricConfig& config = {}) {
    require_same_extent(pred.extent(), gt.extent(), "global_metrics");
    GlobalMetrics out;
    auto whole = all_pixels(pred.extent());
    out.mae = region_mae(pred, gt, whole);
    const ThresholdSweep s = sweep(pred, gt, whole, config);
    out.f_mean = mean_f(s);
    out.f_max = max_f(s);
    const std::size_t positives = gt.salient_count();
    if (positives > 0 && positives < gt.size()) out.auc = auc_rank(pred, gt, whole);
    out.e = e_measure(pred, gt);
    return out;
}

struct DecompositionResiduals {
    double mae = 0.0;  // |whole MAE - area-weighted sum of region MAEs|
    double f = 0.0;    // max over thresholds of |whole F - F from summed counts|
};

// Checks that MAE and F recompose exactly from any disjoint cover of the
// image: MAE as the pixel-count-weighted mean of region MAEs, F by summing
// per-region confusion counts. Throws if the regions overlap or miss pixels.
inline DecompositionResiduals verify_decompositions(const SaliencyMap& pred, const BinaryMask& gt,
                                                    const std::vector<std::vector<std::size_t>>& regions,
                                                    const MetricConfig& config = {}) {
    require_same_extent(pred.extent(), gt.extent(), "verify_decompositions");
    config.validate();
    const std::size_t n = pred.size();

    std::vector<std::uint8_t> seen(n, 0);
    for (const auto& region : regions)
        for (std::size_t i : region) {
            if (i >= n) throw std::invalid_argument("verify_decompositions: index out of range");
            if (seen[i]) throw std::invalid_argument("verify_decompositions: regions overlap");
            seen[i] = 1;
        }
    for (std::uint8_t v : seen)
        if (!v) throw std::invalid_argument("verify_decompositions: regions do not cover the image");

    DecompositionResiduals out;

    double weighted_mae = 0.0;
    for (const auto& region : regions) {
        if (region.empty()) continue;
        weighted_mae += (static_cast<double>(region.size()) / static_cast<double>(n)) *
                        region_mae(pred, gt, region);
    }
    out.mae = std::abs(region_mae(pred, gt, all_pixels(pred.extent())) - weighted_mae);

    const ThresholdSweep whole = sweep(pred, gt, all_pixels(pred.extent()), config);
    std::vector<ConfusionCounts> summed(config.threshold_count);
    for (const auto& region : regions) {
        if (region.empty()) continue;
        const ThresholdSweep part = sweep(pred, gt, region, config);
        for (std::size_t j = 0; j < summed.size(); ++j) {
            summed[j].tp += part.counts[j].tp;
            summed[j].fp += part.counts[j].fp;
            summed[j].fn += part.counts[j].fn;
            summed[j].tn += part.counts[j].tn;
        }
    }
    for (std::size_t j = 0; j < summed.size(); ++j)
        out.f = std::max(out.f, std::abs(whole.f_beta[j] - f_beta_score(summed[j], config.beta2)));
    return out;
}

}  // namespace sieval
