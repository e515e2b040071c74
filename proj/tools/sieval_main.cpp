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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sieval/sieval.hpp"

namespace fs = std::filesystem;

namespace {

sieval::AlphaMode parse_alpha_mode(const std::string& text) {
    if (text == "separable") return sieval::AlphaMode::separable();
    if (text == "composite") return sieval::AlphaMode::composite();
    if (text.rfind("fixed:", 0) == 0) {
        std::size_t used = 0;
        const std::string value = text.substr(6);
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("bad alpha value: " + value);
        return sieval::AlphaMode::fixed(v);
    }
    throw std::invalid_argument("bad alpha mode: " + text +
                                " (expected separable, composite, or fixed:<v>)");
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": short write");
}

struct SharedFlags {
    int connectivity = 8;
    double beta2 = 0.3;
    int binarize = 128;
    std::string alpha_mode = "separable";
    std::size_t min_area = 0;

    void attach(CLI::App* cmd, bool with_beta2 = true,
                const std::string& alpha_flag = "--alpha-mode") {
        cmd->add_option("--connectivity", connectivity, "Component adjacency")
            ->check(CLI::IsMember({4, 8}))
            ->capture_default_str();
        if (with_beta2)
            cmd->add_option("--beta2", beta2, "F-measure beta^2")->capture_default_str();
        cmd->add_option("--binarize", binarize, "Ground-truth byte threshold")
            ->check(CLI::Range(0, 255))
            ->capture_default_str();
        cmd->add_option(alpha_flag, alpha_mode,
                        "Background weighting: separable|composite|fixed:<v>")
            ->capture_default_str();
        cmd->add_option("--min-area", min_area, "Drop components smaller than this many pixels")
            ->capture_default_str();
    }

    sieval::MetricConfig config() const {
        sieval::MetricConfig c;
        c.beta2 = beta2;
        c.connectivity = connectivity == 4 ? sieval::Connectivity::four
                                           : sieval::Connectivity::eight;
        c.binarize_threshold = static_cast<std::uint8_t>(binarize);
        c.alpha_mode = parse_alpha_mode(alpha_mode);
        c.min_area = min_area;
        c.validate();
        return c;
    }
};

int run_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out_path,
             const fs::path& csv_path, const std::string& metrics, const SharedFlags& flags,
             std::size_t jobs) {
    const sieval::MetricConfig config = flags.config();
    const sieval::MetricSelection select =
        metrics.empty() ? sieval::MetricSelection{} : sieval::MetricSelection::parse(metrics);

    const sieval::DatasetReport report =
        sieval::evaluate_dataset(pred_dir, gt_dir, config, jobs, select);

    write_text_file(out_path, sieval::report_json(report).dump(2) + "\n");
    if (!csv_path.empty()) write_text_file(csv_path, sieval::report_csv(report));

    std::cout << "evaluated " << report.counts.images - report.counts.failed << "/"
              << report.counts.images << " pairs";
    if (!report.unmatched_pred.empty() || !report.unmatched_gt.empty())
        std::cout << " (" << report.unmatched_pred.size() << " unmatched predictions, "
                  << report.unmatched_gt.size() << " unmatched masks)";
    std::cout << "\n";
    for (const sieval::ImageMetrics& m : report.images)
        if (m.error) std::cerr << "failed: " << *m.error << "\n";
    return report.counts.failed == 0 ? 0 : 1;
}

int run_partition(const fs::path& gt_path, const SharedFlags& flags) {
    const sieval::MetricConfig config = flags.config();
    const sieval::BinaryMask gt = sieval::load_ground_truth(gt_path, config.binarize_threshold);
    const sieval::Partition part =
        sieval::build_partition(gt, config.alpha_mode, config.connectivity, config.min_area);
    std::cout << sieval::partition_manifest(part, gt_path.stem().string()).dump(2) << "\n";
    return 0;
}

int run_weights(const fs::path& gt_dir, const fs::path& out_dir, const SharedFlags& flags) {
    const sieval::MetricConfig config = flags.config();
    const auto masks = sieval::detail::stem_index(gt_dir);
    if (masks.empty()) throw std::runtime_error(gt_dir.string() + ": no mask files found");
    fs::create_directories(out_dir);

    std::size_t failed = 0;
    for (const auto& [stem, path] : masks) {
        try {
            const sieval::BinaryMask gt = sieval::load_ground_truth(path, config.binarize_threshold);
            const sieval::Partition part = sieval::build_partition(gt, config.alpha_mode,
                                                                   config.connectivity,
                                                                   config.min_area);
            const sieval::WeightMap map = sieval::weight_map(part);
            sieval::write_weight_map(map, out_dir / (stem + ".pfm"), out_dir / (stem + ".json"),
                                     stem);
        } catch (const std::exception& e) {
            std::cerr << "failed: " << e.what() << "\n";
            ++failed;
        }
    }
    std::cout << "wrote " << masks.size() - failed << "/" << masks.size() << " weight maps to "
              << out_dir.string() << "\n";
    return failed == 0 ? 0 : 1;
}

int run_buckets(const fs::path& report_path, const std::string& by, const std::string& basis,
                const fs::path& out_path) {
    std::ifstream in(report_path);
    if (!in) throw std::runtime_error(report_path.string() + ": cannot open file");
    nlohmann::json report = nlohmann::json::parse(in);

    const sieval::BucketReport buckets = sieval::bucket_report(
        sieval::frame_samples(report),
        by == "size" ? sieval::BucketBy::size : sieval::BucketBy::count,
        basis == "object" ? sieval::SizeBasis::object : sieval::SizeBasis::box);
    write_text_file(out_path, sieval::bucket_json(buckets).dump(2) + "\n");
    std::cout << "bucketed " << buckets.total_frames << " frames by " << by << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Salient-object-detection evaluation with size-invariant metrics"};
    app.require_subcommand(1);

    fs::path pred_dir, gt_dir, gt_file, out_path, csv_path, report_path;
    std::string metrics, by = "size", size_basis = "box";
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    SharedFlags eval_flags, partition_flags, weights_flags;

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a prediction directory against masks");
    eval->add_option("--pred", pred_dir, "Prediction directory")->required();
    eval->add_option("--gt", gt_dir, "Ground-truth directory")->required();
    eval->add_option("--out", out_path, "Output report (json)")->required();
    eval->add_option("--csv", csv_path, "Also write a per-image csv");
    eval->add_option("--metrics", metrics,
                     "Comma list among mae,f,auc,e_m,si_mae,si_f,si_auc (default: all)");
    eval->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    eval_flags.attach(eval);

    CLI::App* partition = app.add_subcommand("partition", "Print the frame partition of one mask");
    partition->add_option("--gt", gt_file, "Ground-truth mask file")->required();
    partition_flags.attach(partition, false);

    CLI::App* weights = app.add_subcommand("weights", "Write per-pixel loss weight maps");
    weights->add_option("--gt", gt_dir, "Ground-truth directory")->required();
    weights->add_option("--out", out_path, "Output directory")->required();
    weights_flags.attach(weights, false, "--mode");

    CLI::App* buckets = app.add_subcommand("buckets", "Group per-frame results from a report");
    buckets->add_option("--report", report_path, "Report json from eval")->required();
    buckets->add_option("--by", by, "Grouping key")->check(CLI::IsMember({"size", "count"}));
    buckets->add_option("--size-basis", size_basis, "Frame area measure for size buckets")
        ->check(CLI::IsMember({"box", "object"}));
    buckets->add_option("--out", out_path, "Output report (json)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eval->parsed()) return run_eval(pred_dir, gt_dir, out_path, csv_path, metrics,
                                            eval_flags, jobs);
        if (partition->parsed()) return run_partition(gt_file, partition_flags);
        if (weights->parsed()) return run_weights(gt_dir, out_path, weights_flags);
        if (buckets->parsed()) return run_buckets(report_path, by, size_basis, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
