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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieval/metrics.hpp"
#include "sieval/partition.hpp"
#include "sieval/raster.hpp"

namespace sieval {

enum class LossKind { bce, mse, l1, dice, iou };

// bce/mse/l1 decompose into per-pixel terms and take the geometry-derived
// background weight; dice/iou are ratios over the region and drop the
// background term instead.
inline bool is_separable(LossKind kind) {
    return kind == LossKind::bce || kind == LossKind::mse || kind == LossKind::l1;
}

inline std::string loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::bce: return "bce";
        case LossKind::mse: return "mse";
        case LossKind::l1: return "l1";
        case LossKind::dice: return "dice";
        case LossKind::iou: return "iou";
    }
    return "bce";
}

inline constexpr double kBceEpsilon = 1e-7;

// Single-pixel term of a separable loss.
inline double pixel_loss(LossKind kind, double pred, double gt) {
    switch (kind) {
        case LossKind::bce: {
            const double p = std::clamp(pred, kBceEpsilon, 1.0 - kBceEpsilon);
            return -(gt * std::log(p) + (1.0 - gt) * std::log(1.0 - p));
        }
        case LossKind::mse: {
            const double d = pred - gt;
            return d * d;
        }
        case LossKind::l1:
            return std::abs(pred - gt);
        default:
            throw std::invalid_argument("pixel_loss: composite loss has no per-pixel form");
    }
}

template <PixelRange R>
double frame_loss(const SaliencyMap& pred, const BinaryMask& gt, R&& region, LossKind kind) {
    require_same_extent(pred.extent(), gt.extent(), "frame_loss");
    if (is_separable(kind)) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i : region) {
            sum += pixel_loss(kind, pred[i], gt[i]);
            ++n;
        }
        if (n == 0) throw std::invalid_argument("frame_loss: empty region");
        return sum / static_cast<double>(n);
    }

    double pg = 0.0, pp = 0.0, gg = 0.0, p_sum = 0.0, g_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i : region) {
        const double p = pred[i];
        const double g = gt[i];
        pg += p * g;
        pp += p * p;
        gg += g * g;
        p_sum += p;
        g_sum += g;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("frame_loss: empty region");
    if (kind == LossKind::dice) {
        const double denom = pp + gg;
        return denom == 0.0 ? 0.0 : 1.0 - 2.0 * pg / denom;
    }
    const double denom = p_sum + g_sum - pg;
    return denom == 0.0 ? 0.0 : 1.0 - pg / denom;
}

// Size-invariant training objective: sum of per-frame losses plus the
// alpha-weighted background loss. Separable kinds take the partition's
// alpha; composite kinds drop the background term. The sum is left
// unnormalized; weight maps carry the 1/(K+alpha) factor instead. With no
// frames the whole-image loss is returned (partition.degenerate flags it).
inline double si_loss(const SaliencyMap& pred, const BinaryMask& gt, const Partition& partition,
                      LossKind kind) {
    require_same_extent(pred.extent(), gt.extent(), "si_loss");
    require_same_extent(pred.extent(), partition.extent, "si_loss");
    if (partition.frames.empty())
        return frame_loss(pred, gt, all_pixels(pred.extent()), kind);

    const double alpha = is_separable(kind) ? partition.alpha : 0.0;
    double sum = 0.0;
    for (const Frame& frame : partition.frames)
        sum += frame_loss(pred, gt, frame_pixels(frame, partition.extent), kind);
    if (alpha != 0.0 && partition.background_area > 0)
        sum += alpha * frame_loss(pred, gt, background_pixels(partition), kind);
    return sum;
}

// Per-pixel weights realizing the size-invariant objective: a pixel gains
// 1/((K+alpha)·S_i) per frame i covering it, background pixels carry
// alpha/((K+alpha)·S_back). Mass sums to 1 whenever K >= 1. Weights stay at
// double precision so their inner product with per-pixel losses reproduces
// the normalized objective; to_raster() quantizes for file export.
struct WeightMap {
    Extent extent;
    std::vector<double> weights;  // row-major
    Partition partition;
    bool degenerate = false;  // no frames; weights are uniform 1/S

    double operator[](std::size_t i) const { return weights[i]; }
    double at(std::size_t row, std::size_t col) const { return weights[extent.index(row, col)]; }
    std::size_t size() const { return weights.size(); }

    double mass() const {
        double sum = 0.0;
        for (double w : weights) sum += w;
        return sum;
    }

    Raster to_raster() const {
        Raster r(extent.width, extent.height);
        for (std::size_t i = 0; i < weights.size(); ++i) r[i] = static_cast<float>(weights[i]);
        return r;
    }
};

inline WeightMap weight_map(const Partition& partition) {
    WeightMap out;
    out.extent = partition.extent;
    out.partition = partition;
    const std::size_t total = partition.extent.area();
    if (total == 0) throw std::invalid_argument("weight_map: empty partition extent");

    if (partition.frames.empty()) {
        out.weights.assign(total, 1.0 / static_cast<double>(total));
        out.degenerate = true;
        return out;
    }

    const double norm = static_cast<double>(partition.frames.size()) + partition.alpha;
    out.weights.assign(total, 0.0);
    for (const Frame& frame : partition.frames) {
        const double w = 1.0 / (norm * static_cast<double>(frame.box_area));
        for (std::size_t i : frame_pixels(frame, partition.extent)) out.weights[i] += w;
    }
    if (partition.alpha != 0.0 && partition.background_area > 0) {
        const double w = partition.alpha / (norm * static_cast<double>(partition.background_area));
        for (std::size_t i : background_pixels(partition)) out.weights[i] = w;
    }
    return out;
}

}  // namespace sieval
