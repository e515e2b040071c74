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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "sieval/si_metrics.hpp"
#include "testutil.hpp"

using namespace sieval;
using Catch::Matchers::WithinAbs;

namespace {

// 10x10 mask holding an L-shaped component whose box ranks perfectly and a
// diagonal pair whose box ranks at 0.75.
struct TwoFrameCase {
    BinaryMask gt;
    SaliencyMap pred;
};

TwoFrameCase auc_two_frame_case() {
    Raster g(10, 10);
    g.at(1, 1) = g.at(2, 1) = g.at(2, 2) = 1.0f;
    g.at(5, 5) = g.at(6, 6) = 1.0f;

    Raster p(10, 10);
    p.at(1, 1) = 0.9f;
    p.at(2, 1) = 0.8f;
    p.at(2, 2) = 0.7f;
    p.at(1, 2) = 0.0f;
    p.at(5, 5) = 0.9f;
    p.at(6, 6) = 0.3f;
    p.at(5, 6) = 0.5f;
    p.at(6, 5) = 0.1f;
    return {BinaryMask(std::move(g)), SaliencyMap(std::move(p))};
}

SaliencyMap embed(const SaliencyMap& base, std::size_t width, std::size_t height, std::size_t dr,
                  std::size_t dc) {
    Raster r(width, height);
    for (std::size_t row = 0; row < base.height(); ++row)
        for (std::size_t col = 0; col < base.width(); ++col)
            r.at(row + dr, col + dc) = base.at(row, col);
    return SaliencyMap(std::move(r));
}

BinaryMask embed(const BinaryMask& base, std::size_t width, std::size_t height, std::size_t dr,
                 std::size_t dc) {
    Raster r(width, height);
    for (std::size_t row = 0; row < base.height(); ++row)
        for (std::size_t col = 0; col < base.width(); ++col)
            r.at(row + dr, col + dc) = base.at(row, col);
    return BinaryMask(std::move(r));
}

}  // namespace

TEST_CASE("si-mae equals mae on single-component masks", "[si_metrics]") {
    std::mt19937 rng(307);
    for (int trial = 0; trial < 25; ++trial) {
        const BinaryMask gt = testutil::random_single_component_mask(rng, 24, 24);
        const SaliencyMap pred = testutil::random_quantized_pred(rng, 24, 24);
        const Partition part = build_partition(gt);
        REQUIRE(part.frames.size() == 1);
        const double plain = region_mae(pred, gt, all_pixels(gt.extent()));
        CHECK_THAT(si_mae(pred, gt, part), WithinAbs(plain, 1e-9));
    }
}

TEST_CASE("p1 si-mae for the all-zero prediction", "[si_metrics]") {
    const BinaryMask gt = testutil::p1_mask();
    const SaliencyMap zero = testutil::pred_of(6, 6, std::vector<float>(36, 0.0f));
    const Partition part = build_partition(gt);
    CHECK(si_mae(zero, gt, part) == 1.75 / 8.2);
    CHECK_THAT(si_mae(zero, gt, part), WithinAbs(0.213415, 1e-6));
}

TEST_CASE("p2 separates on si-mae while mae ties", "[si_metrics]") {
    const BinaryMask gt = testutil::p2_mask();
    const SaliencyMap a = testutil::p2_pred_a();
    const SaliencyMap b = testutil::p2_pred_b();
    const Partition part = build_partition(gt);
    REQUIRE(part.alpha == 19.0);

    const double mae_a = region_mae(a, gt, all_pixels(gt.extent()));
    const double mae_b = region_mae(b, gt, all_pixels(gt.extent()));
    CHECK(mae_a == 0.01);
    CHECK(mae_b == 0.01);

    const double si_a = si_mae(a, gt, part);
    const double si_b = si_mae(b, gt, part);
    CHECK_THAT(si_a, WithinAbs(1.0 / 21.0, 1e-12));
    CHECK_THAT(si_b, WithinAbs(0.25 / 21.0, 1e-12));
    CHECK_THAT(si_a / si_b, WithinAbs(4.0, 1e-12));
    CHECK(si_a > si_b);
}

TEST_CASE("perfect binary prediction scores one on both si-f variants", "[si_metrics]") {
    const BinaryMask gt = testutil::p1_mask();
    const SaliencyMap pred = testutil::pred_from_mask(gt);
    const Partition part = build_partition(gt);
    CHECK(si_f(pred, gt, part, FVariant::max) == 1.0);
    CHECK(si_f(pred, gt, part, FVariant::mean) == 1.0);
}

TEST_CASE("p2 separates on si-f while whole-image f ties", "[si_metrics]") {
    const BinaryMask gt = testutil::p2_mask();
    const SaliencyMap a = testutil::p2_pred_a();
    const SaliencyMap b = testutil::p2_pred_b();
    const Partition part = build_partition(gt);

    const double whole_a = max_f(sweep(a, gt, all_pixels(gt.extent())));
    const double whole_b = max_f(sweep(b, gt, all_pixels(gt.extent())));
    CHECK_THAT(whole_a, WithinAbs(whole_b, 1e-12));
    CHECK_THAT(whole_a, WithinAbs(5.2 / 5.5, 1e-15));
    CHECK_THAT(whole_a, WithinAbs(0.945455, 1e-6));

    const double si_a = si_f(a, gt, part, FVariant::max);
    const double si_b = si_f(b, gt, part, FVariant::max);
    CHECK(si_a == 0.5);
    CHECK_THAT(si_b, WithinAbs(0.9642857142857143, 1e-12));
    CHECK_THAT(si_b, WithinAbs(0.964286, 1e-6));
    CHECK(si_b > si_a);
}

TEST_CASE("single-frame si-f reduces to the frame score", "[si_metrics]") {
    std::mt19937 rng(311);
    const BinaryMask gt = testutil::random_single_component_mask(rng, 12, 12);
    const SaliencyMap pred = testutil::random_quantized_pred(rng, 12, 12);
    const Partition part = build_partition(gt);
    REQUIRE(part.frames.size() == 1);

    const ThresholdSweep frame = sweep(pred, gt, frame_pixels(part.frames[0], part.extent));
    CHECK(si_f(pred, gt, part, FVariant::max) == frame_f(frame, FVariant::max));
    CHECK(si_f(pred, gt, part, FVariant::mean) == frame_f(frame, FVariant::mean));

    const Partition none = build_partition(testutil::mask_of(4, 4, std::vector<float>(16, 0.0f)));
    CHECK_THROWS_AS(si_f(testutil::random_quantized_pred(rng, 4, 4),
                         testutil::mask_of(4, 4, std::vector<float>(16, 0.0f)), none,
                         FVariant::max),
                    std::invalid_argument);
}

TEST_CASE("si-auc averages frames and excludes single-class boxes", "[si_metrics]") {
    const BinaryMask gt = testutil::p1_mask();
    const SaliencyMap pred = testutil::pred_from_mask(gt);
    const Partition part = build_partition(gt);

    // Frame B is a single positive pixel, so only frame A has a curve.
    const SiAucResult perfect = si_auc(pred, gt, part);
    REQUIRE(perfect.value.has_value());
    CHECK(*perfect.value == 1.0);
    CHECK(perfect.excluded_frames == 1);

    const TwoFrameCase two = auc_two_frame_case();
    const SiAucResult mixed = si_auc(two.pred, two.gt, build_partition(two.gt));
    REQUIRE(mixed.value.has_value());
    CHECK(*mixed.value == 0.875);
    CHECK(mixed.excluded_frames == 0);

    // A solid rectangle fills its box; no frame is scoreable.
    Raster solid(8, 8);
    for (std::size_t row = 2; row <= 4; ++row)
        for (std::size_t col = 3; col <= 5; ++col) solid.at(row, col) = 1.0f;
    const BinaryMask solid_gt{std::move(solid)};
    const SiAucResult excluded =
        si_auc(testutil::pred_from_mask(solid_gt), solid_gt, build_partition(solid_gt));
    CHECK_FALSE(excluded.value.has_value());
    CHECK(excluded.excluded_frames == 1);
}

TEST_CASE("global metrics bundle the whole-image kernels", "[si_metrics]") {
    const BinaryMask gt = testutil::p1_mask();
    const GlobalMetrics perfect = global_metrics(testutil::pred_from_mask(gt), gt);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.f_max == 1.0);
    REQUIRE(perfect.auc.has_value());
    CHECK(*perfect.auc == 1.0);
    CHECK(perfect.e == 1.0);

    const SaliencyMap zero = testutil::pred_of(6, 6, std::vector<float>(36, 0.0f));
    const GlobalMetrics miss = global_metrics(zero, gt);
    CHECK(miss.mae == 4.0 / 36.0);

    const BinaryMask empty = testutil::mask_of(6, 6, std::vector<float>(36, 0.0f));
    const GlobalMetrics single_class = global_metrics(zero, empty);
    CHECK_FALSE(single_class.auc.has_value());
    CHECK(single_class.e == 1.0);
}

TEST_CASE("decomposition identities hold on disjoint covers", "[si_metrics]") {
    std::mt19937 rng(313);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask gt = testutil::random_mask(rng, 16, 16);
        const SaliencyMap pred = trial % 2 == 0 ? testutil::random_quantized_pred(rng, 16, 16)
                                                : testutil::random_float_pred(rng, 16, 16);
        std::vector<std::vector<std::size_t>> rows(16);
        for (std::size_t r = 0; r < 16; ++r)
            for (std::size_t c = 0; c < 16; ++c) rows[r].push_back(r * 16 + c);
        const DecompositionResiduals res = verify_decompositions(pred, gt, rows);
        CHECK(res.mae <= 1e-12);
        CHECK(res.f <= 1e-12);
    }
}

TEST_CASE("whole-image region decomposes with zero residual", "[si_metrics]") {
    std::mt19937 rng(317);
    const BinaryMask gt = testutil::random_mask(rng, 9, 9);
    const SaliencyMap pred = testutil::random_quantized_pred(rng, 9, 9);
    std::vector<std::vector<std::size_t>> whole(1);
    for (std::size_t i = 0; i < 81; ++i) whole[0].push_back(i);
    const DecompositionResiduals res = verify_decompositions(pred, gt, whole);
    CHECK(res.mae == 0.0);
    CHECK(res.f == 0.0);
}

TEST_CASE("p1 boxes plus background form a valid cover", "[si_metrics]") {
    const BinaryMask gt = testutil::p1_mask();
    std::mt19937 rng(331);
    const SaliencyMap pred = testutil::random_quantized_pred(rng, 6, 6);
    const Partition part = build_partition(gt);

    std::vector<std::vector<std::size_t>> regions;
    for (const Frame& f : part.frames) {
        std::vector<std::size_t> box;
        for (std::size_t i : frame_pixels(f, part.extent)) box.push_back(i);
        regions.push_back(std::move(box));
    }
    std::vector<std::size_t> back;
    for (std::size_t i : background_pixels(part)) back.push_back(i);
    regions.push_back(std::move(back));

    const DecompositionResiduals res = verify_decompositions(pred, gt, regions);
    CHECK(res.mae <= 1e-12);
    CHECK(res.f <= 1e-12);

    auto overlapping = regions;
    overlapping.push_back({0});
    CHECK_THROWS_AS(verify_decompositions(pred, gt, overlapping), std::invalid_argument);

    auto gap = regions;
    gap.back().pop_back();
    CHECK_THROWS_AS(verify_decompositions(pred, gt, gap), std::invalid_argument);
}

TEST_CASE("si metrics are translation invariant", "[si_metrics]") {
    const TwoFrameCase base = auc_two_frame_case();
    const BinaryMask gt0 = embed(base.gt, 24, 24, 0, 0);
    const SaliencyMap pred0 = embed(base.pred, 24, 24, 0, 0);
    const BinaryMask gt1 = embed(base.gt, 24, 24, 9, 13);
    const SaliencyMap pred1 = embed(base.pred, 24, 24, 9, 13);

    const Partition part0 = build_partition(gt0);
    const Partition part1 = build_partition(gt1);
    CHECK_THAT(si_mae(pred1, gt1, part1), WithinAbs(si_mae(pred0, gt0, part0), 1e-12));
    CHECK_THAT(si_f(pred1, gt1, part1, FVariant::max),
               WithinAbs(si_f(pred0, gt0, part0, FVariant::max), 1e-12));
    CHECK_THAT(si_f(pred1, gt1, part1, FVariant::mean),
               WithinAbs(si_f(pred0, gt0, part0, FVariant::mean), 1e-12));
    const SiAucResult auc0 = si_auc(pred0, gt0, part0);
    const SiAucResult auc1 = si_auc(pred1, gt1, part1);
    REQUIRE(auc0.value.has_value());
    REQUIRE(auc1.value.has_value());
    CHECK_THAT(*auc1.value, WithinAbs(*auc0.value, 1e-12));
}

TEST_CASE("si aggregates stay within per-frame bounds", "[si_metrics]") {
    std::mt19937 rng(337);
    for (int trial = 0; trial < 15; ++trial) {
        const BinaryMask gt = testutil::random_multiobject_mask(rng, 20, 20);
        const SaliencyMap pred = testutil::random_quantized_pred(rng, 20, 20);
        const Partition part = build_partition(gt);
        REQUIRE(!part.frames.empty());

        double f_min = 1.0, f_max_val = 0.0;
        for (const Frame& frame : part.frames) {
            const double f =
                frame_f(sweep(pred, gt, frame_pixels(frame, part.extent)), FVariant::max);
            f_min = std::min(f_min, f);
            f_max_val = std::max(f_max_val, f);
        }
        const double si = si_f(pred, gt, part, FVariant::max);
        CHECK(si >= f_min - 1e-12);
        CHECK(si <= f_max_val + 1e-12);

        const SiAucResult auc = si_auc(pred, gt, part);
        if (auc.value) {
            double a_min = 1.0, a_max = 0.0;
            for (const Frame& frame : part.frames) {
                FramePixelRange box = frame_pixels(frame, part.extent);
                std::size_t positives = 0;
                for (std::size_t i : box) positives += gt.is_salient(i);
                if (positives == 0 || positives == box.size()) continue;
                const double a = auc_rank(pred, gt, box);
                a_min = std::min(a_min, a);
                a_max = std::max(a_max, a);
            }
            CHECK(*auc.value >= a_min - 1e-12);
            CHECK(*auc.value <= a_max + 1e-12);
        }
    }
}
