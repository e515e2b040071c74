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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sieval/image_io.hpp"
#include "sieval/metrics.hpp"
#include "sieval/partition.hpp"
#include "sieval/raster.hpp"
#include "sieval/si_metrics.hpp"

namespace sieval {

struct MetricSelection {
    bool mae = true;
    bool f = true;
    bool auc = true;
    bool e = true;
    bool si_mae = true;
    bool si_f = true;
    bool si_auc = true;

    static MetricSelection none() { return {false, false, false, false, false, false, false}; }

    static MetricSelection parse(const std::string& list) {
        MetricSelection sel = none();
        std::istringstream in(list);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (token.empty()) continue;
            if (token == "mae") sel.mae = true;
            else if (token == "f") sel.f = true;
            else if (token == "auc") sel.auc = true;
            else if (token == "e_m") sel.e = true;
            else if (token == "si_mae") sel.si_mae = true;
            else if (token == "si_f") sel.si_f = true;
            else if (token == "si_auc") sel.si_auc = true;
            else throw std::invalid_argument("unknown metric: " + token);
        }
        return sel;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        if (mae) out.push_back("mae");
        if (f) out.push_back("f");
        if (auc) out.push_back("auc");
        if (e) out.push_back("e_m");
        if (si_mae) out.push_back("si_mae");
        if (si_f) out.push_back("si_f");
        if (si_auc) out.push_back("si_auc");
        return out;
    }
};

struct FrameMetrics {
    std::size_t id = 0;
    std::size_t box_area = 0;
    std::size_t object_pixels = 0;
    double mae = 0.0;
};

struct ImageMetrics {
    std::string image;
    std::size_t width = 0, height = 0;
    std::size_t k = 0;
    double alpha = 0.0;
    bool degenerate = false;  // k = 0: si values fall back to whole-image ones
    std::optional<double> mae, f_mean, f_max, auc, e;
    std::optional<double> si_mae, si_f_mean, si_f_max, si_auc;
    std::size_t si_auc_excluded = 0;
    std::vector<FrameMetrics> frames;
    std::optional<std::string> error;  // set instead of metrics when the pair failed
};

inline ImageMetrics compute_image_metrics(const SaliencyMap& pred, const BinaryMask& gt,
                                          const MetricConfig& config = {},
                                          const MetricSelection& select = {}) {
    require_same_extent(pred.extent(), gt.extent(), "compute_image_metrics");
    config.validate();

    ImageMetrics m;
    m.width = pred.width();
    m.height = pred.height();

    const Partition part = build_partition(gt, config.alpha_mode, config.connectivity,
                                           config.min_area);
    m.k = part.frames.size();
    m.alpha = part.alpha;
    m.degenerate = part.degenerate;

    auto whole = all_pixels(pred.extent());
    if (select.mae) m.mae = region_mae(pred, gt, whole);
    if (select.f) {
        const ThresholdSweep s = sweep(pred, gt, whole, config);
        m.f_mean = mean_f(s);
        m.f_max = max_f(s);
    }
    if (select.auc) {
        const std::size_t positives = gt.salient_count();
        if (positives > 0 && positives < gt.size()) m.auc = auc_rank(pred, gt, whole);
    }
    if (select.e) m.e = e_measure(pred, gt);
    if (select.si_mae) m.si_mae = si_mae(pred, gt, part);
    if (!part.frames.empty()) {
        if (select.si_f) {
            double mean_sum = 0.0, max_sum = 0.0;
            for (const Frame& frame : part.frames) {
                const ThresholdSweep s = sweep(pred, gt, frame_pixels(frame, part.extent), config);
                mean_sum += frame_f(s, FVariant::mean);
                max_sum += frame_f(s, FVariant::max);
            }
            m.si_f_mean = mean_sum / static_cast<double>(part.frames.size());
            m.si_f_max = max_sum / static_cast<double>(part.frames.size());
        }
        if (select.si_auc) {
            const SiAucResult r = si_auc(pred, gt, part);
            m.si_auc = r.value;
            m.si_auc_excluded = r.excluded_frames;
        }
    }
    for (const Frame& frame : part.frames)
        m.frames.push_back({frame.id, frame.box_area, frame.object_pixels,
                            region_mae(pred, gt, frame_pixels(frame, part.extent))});
    return m;
}

inline ImageMetrics evaluate_pair(const std::filesystem::path& pred_path,
                                  const std::filesystem::path& gt_path,
                                  const MetricConfig& config = {},
                                  const MetricSelection& select = {}) {
    const SaliencyMap pred = load_prediction(pred_path);
    const BinaryMask gt = load_ground_truth(gt_path, config.binarize_threshold);
    if (!(pred.extent() == gt.extent()))
        throw std::runtime_error(pred_path.stem().string() + ": prediction " +
                                 std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                                 " does not match ground truth " + std::to_string(gt.width()) + "x" +
                                 std::to_string(gt.height()));
    ImageMetrics m = compute_image_metrics(pred, gt, config, select);
    m.image = pred_path.stem().string();
    return m;
}

struct DatasetCounts {
    std::size_t images = 0;  // paired files, evaluated or failed
    std::size_t failed = 0;
    std::size_t k0_images = 0;
    std::size_t si_auc_excluded_frames = 0;
};

struct DatasetReport {
    MetricConfig config;
    MetricSelection selection;
    std::vector<ImageMetrics> images;  // stem-sorted
    std::vector<std::string> unmatched_pred, unmatched_gt;
    DatasetCounts counts;
};

namespace detail {

// One file per stem; among same-stem files the smallest filename wins.
inline std::map<std::string, std::filesystem::path> stem_index(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a directory");
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string stem = entry.path().stem().string();
        auto [it, inserted] = out.emplace(stem, entry.path());
        if (!inserted && entry.path().filename().string() < it->second.filename().string())
            it->second = entry.path();
    }
    return out;
}

}  // namespace detail

inline DatasetReport evaluate_dataset(const std::filesystem::path& pred_dir,
                                      const std::filesystem::path& gt_dir,
                                      const MetricConfig& config = {}, std::size_t jobs = 1,
                                      const MetricSelection& select = {}) {
    config.validate();
    const auto preds = detail::stem_index(pred_dir);
    const auto gts = detail::stem_index(gt_dir);

    DatasetReport report;
    report.config = config;
    report.selection = select;

    struct Pair {
        std::string stem;
        std::filesystem::path pred, gt;
    };
    std::vector<Pair> pairs;
    for (const auto& [stem, path] : preds) {
        auto it = gts.find(stem);
        if (it == gts.end()) {
            report.unmatched_pred.push_back(stem);
            continue;
        }
        pairs.push_back({stem, path, it->second});
    }
    for (const auto& [stem, path] : gts)
        if (!preds.contains(stem)) report.unmatched_gt.push_back(stem);

    if (pairs.empty())
        throw std::runtime_error("no prediction/ground-truth pairs found between " +
                                 pred_dir.string() + " and " + gt_dir.string());

    report.images.resize(pairs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
            ImageMetrics& slot = report.images[i];
            try {
                slot = evaluate_pair(pairs[i].pred, pairs[i].gt, config, select);
            } catch (const std::exception& e) {
                slot = ImageMetrics{};
                slot.error = e.what();
            }
            slot.image = pairs[i].stem;
        }
    };

    const std::size_t thread_count = std::max<std::size_t>(1, std::min(jobs, pairs.size()));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    report.counts.images = pairs.size();
    for (const ImageMetrics& m : report.images) {
        if (m.error) {
            ++report.counts.failed;
            continue;
        }
        if (m.degenerate) ++report.counts.k0_images;
        report.counts.si_auc_excluded_frames += m.si_auc_excluded;
    }
    return report;
}

// Aggregate means; each field averages the images that carry the metric.
struct AggregateMetrics {
    std::optional<double> mae, f_mean, f_max, auc, e;
    std::optional<double> si_mae, si_f_mean, si_f_max, si_auc;
};

inline AggregateMetrics aggregate(const std::vector<ImageMetrics>& images) {
    AggregateMetrics out;
    auto fold = [&](std::optional<double> ImageMetrics::*field, std::optional<double>& dest) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const ImageMetrics& m : images) {
            if (m.error || !(m.*field)) continue;
            sum += *(m.*field);
            ++n;
        }
        if (n > 0) dest = sum / static_cast<double>(n);
    };
    fold(&ImageMetrics::mae, out.mae);
    fold(&ImageMetrics::f_mean, out.f_mean);
    fold(&ImageMetrics::f_max, out.f_max);
    fold(&ImageMetrics::auc, out.auc);
    fold(&ImageMetrics::e, out.e);
    fold(&ImageMetrics::si_mae, out.si_mae);
    fold(&ImageMetrics::si_f_mean, out.si_f_mean);
    fold(&ImageMetrics::si_f_max, out.si_f_max);
    fold(&ImageMetrics::si_auc, out.si_auc);
    return out;
}

namespace detail {

inline std::string alpha_mode_label(const AlphaMode& mode) {
    if (mode.kind != AlphaKind::fixed) return mode.name();
    std::ostringstream out;
    out << "fixed:" << mode.value;
    return out.str();
}

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace detail

inline nlohmann::ordered_json report_json(const DatasetReport& report) {
    nlohmann::ordered_json j;
    j["config"] = {{"beta2", report.config.beta2},
                   {"threshold_count", report.config.threshold_count},
                   {"connectivity", static_cast<int>(report.config.connectivity)},
                   {"binarize", report.config.binarize_threshold},
                   {"alpha_mode", detail::alpha_mode_label(report.config.alpha_mode)},
                   {"min_area", report.config.min_area},
                   {"metrics", report.selection.names()}};

    j["images"] = nlohmann::ordered_json::array();
    for (const ImageMetrics& m : report.images) {
        nlohmann::ordered_json rec;
        rec["image"] = m.image;
        if (m.error) {
            rec["error"] = *m.error;
            j["images"].push_back(std::move(rec));
            continue;
        }
        rec["width"] = m.width;
        rec["height"] = m.height;
        rec["k"] = m.k;
        rec["alpha"] = m.alpha;
        rec["degenerate"] = m.degenerate;
        rec["mae"] = detail::opt_json(m.mae);
        rec["f_mean"] = detail::opt_json(m.f_mean);
        rec["f_max"] = detail::opt_json(m.f_max);
        rec["auc"] = detail::opt_json(m.auc);
        rec["e_m"] = detail::opt_json(m.e);
        rec["si_mae"] = detail::opt_json(m.si_mae);
        rec["si_f_mean"] = detail::opt_json(m.si_f_mean);
        rec["si_f_max"] = detail::opt_json(m.si_f_max);
        rec["si_auc"] = detail::opt_json(m.si_auc);
        rec["si_auc_excluded_frames"] = m.si_auc_excluded;
        rec["frames"] = nlohmann::ordered_json::array();
        for (const FrameMetrics& f : m.frames)
            rec["frames"].push_back({{"id", f.id},
                                     {"box_area", f.box_area},
                                     {"object_pixels", f.object_pixels},
                                     {"mae", f.mae}});
        j["images"].push_back(std::move(rec));
    }

    const AggregateMetrics agg = aggregate(report.images);
    j["aggregate"] = {{"mae", detail::opt_json(agg.mae)},
                      {"f_mean", detail::opt_json(agg.f_mean)},
                      {"f_max", detail::opt_json(agg.f_max)},
                      {"auc", detail::opt_json(agg.auc)},
                      {"e_m", detail::opt_json(agg.e)},
                      {"si_mae", detail::opt_json(agg.si_mae)},
                      {"si_f_mean", detail::opt_json(agg.si_f_mean)},
                      {"si_f_max", detail::opt_json(agg.si_f_max)},
                      {"si_auc", detail::opt_json(agg.si_auc)}};

    j["counts"] = {{"images", report.counts.images},
                   {"failed", report.counts.failed},
                   {"k0_images", report.counts.k0_images},
                   {"si_auc_excluded_frames", report.counts.si_auc_excluded_frames}};

    j["unmatched"] = {{"pred", report.unmatched_pred}, {"gt", report.unmatched_gt}};
    return j;
}

// One row per successfully evaluated image, doubles with 6 decimals, absent
// metrics as empty fields.
inline std::string report_csv(const DatasetReport& report) {
    std::string out =
        "image,width,height,k,alpha,mae,f_mean,f_max,auc,e_m,si_mae,si_f_mean,si_f_max,si_auc\n";
    char buf[64];
    auto cell = [&](const std::optional<double>& v) {
        out.push_back(',');
        if (!v) return;
        std::snprintf(buf, sizeof buf, "%.6f", *v);
        out += buf;
    };
    for (const ImageMetrics& m : report.images) {
        if (m.error) continue;
        out += m.image;
        out.push_back(',');
        out += std::to_string(m.width);
        out.push_back(',');
        out += std::to_string(m.height);
        out.push_back(',');
        out += std::to_string(m.k);
        std::snprintf(buf, sizeof buf, ",%.6f", m.alpha);
        out += buf;
        cell(m.mae);
        cell(m.f_mean);
        cell(m.f_max);
        cell(m.auc);
        cell(m.e);
        cell(m.si_mae);
        cell(m.si_f_mean);
        cell(m.si_f_max);
        cell(m.si_auc);
        out.push_back('\n');
    }
    return out;
}

enum class BucketBy { size, count };
enum class SizeBasis { box, object };

// One foreground frame with the context needed for bucketing.
struct FrameSample {
    std::string image;
    std::size_t k = 0;
    std::size_t image_area = 0;
    std::size_t box_area = 0;
    std::size_t object_pixels = 0;
    double mae = 0.0;
};

inline std::vector<FrameSample> frame_samples(const DatasetReport& report) {
    std::vector<FrameSample> out;
    for (const ImageMetrics& m : report.images) {
        if (m.error) continue;
        for (const FrameMetrics& f : m.frames)
            out.push_back({m.image, m.k, m.width * m.height, f.box_area, f.object_pixels, f.mae});
    }
    return out;
}

inline std::vector<FrameSample> frame_samples(const nlohmann::json& report) {
    std::vector<FrameSample> out;
    for (const auto& rec : report.at("images")) {
        if (rec.contains("error")) continue;
        const std::size_t area =
            rec.at("width").get<std::size_t>() * rec.at("height").get<std::size_t>();
        const std::size_t k = rec.at("k").get<std::size_t>();
        for (const auto& f : rec.at("frames"))
            out.push_back({rec.at("image").get<std::string>(), k, area,
                           f.at("box_area").get<std::size_t>(),
                           f.at("object_pixels").get<std::size_t>(), f.at("mae").get<double>()});
    }
    return out;
}

struct Bucket {
    std::string label;
    std::size_t frames = 0;
    std::optional<double> mean_mae;
};

struct BucketReport {
    BucketBy by = BucketBy::size;
    SizeBasis basis = SizeBasis::box;
    std::vector<Bucket> buckets;
    std::size_t total_frames = 0;
};

// Size mode: deciles of frame area over image area, left-closed, the last
// interval closed at 1. Count mode: one bucket per observed per-image K.
inline BucketReport bucket_report(const std::vector<FrameSample>& samples, BucketBy by,
                                  SizeBasis basis = SizeBasis::box) {
    BucketReport out;
    out.by = by;
    out.basis = basis;
    out.total_frames = samples.size();
    if (samples.empty()) return out;

    if (by == BucketBy::size) {
        static const char* kLabels[10] = {"[0%,10%)",  "[10%,20%)", "[20%,30%)", "[30%,40%)",
                                          "[40%,50%)", "[50%,60%)", "[60%,70%)", "[70%,80%)",
                                          "[80%,90%)", "[90%,100%]"};
        double sums[10] = {};
        std::size_t counts[10] = {};
        for (const FrameSample& s : samples) {
            const std::size_t area = basis == SizeBasis::box ? s.box_area : s.object_pixels;
            const std::size_t idx =
                std::min<std::size_t>(9, (10 * area) / std::max<std::size_t>(1, s.image_area));
            sums[idx] += s.mae;
            counts[idx] += 1;
        }
        for (std::size_t i = 0; i < 10; ++i) {
            Bucket b;
            b.label = kLabels[i];
            b.frames = counts[i];
            if (counts[i] > 0) b.mean_mae = sums[i] / static_cast<double>(counts[i]);
            out.buckets.push_back(std::move(b));
        }
        return out;
    }

    std::map<std::size_t, std::pair<double, std::size_t>> groups;
    for (const FrameSample& s : samples) {
        auto& [sum, count] = groups[s.k];
        sum += s.mae;
        count += 1;
    }
    for (const auto& [k, acc] : groups) {
        Bucket b;
        b.label = std::to_string(k);
        b.frames = acc.second;
        b.mean_mae = acc.first / static_cast<double>(acc.second);
        out.buckets.push_back(std::move(b));
    }
    return out;
}

inline nlohmann::ordered_json bucket_json(const BucketReport& report) {
    nlohmann::ordered_json j;
    j["by"] = report.by == BucketBy::size ? "size" : "count";
    if (report.by == BucketBy::size)
        j["size_basis"] = report.basis == SizeBasis::box ? "box" : "object";
    j["buckets"] = nlohmann::ordered_json::array();
    for (const Bucket& b : report.buckets)
        j["buckets"].push_back(
            {{"bucket", b.label}, {"frames", b.frames}, {"mean_mae", detail::opt_json(b.mean_mae)}});
    j["total_frames"] = report.total_frames;
    return j;
}

}  // namespace sieval
