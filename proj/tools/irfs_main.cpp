// Copyright 2026 The irfs Authors
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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irfs/irfs.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 70;

// Writes through a temporary string-equivalent path or stdout when path is
// "-".
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) {
        throw irfs::Error(irfs::ErrorCode::FileNotFound, "cannot write '" + path + "'");
      }
    }
  }

  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

irfs::Method parse_method_or_throw(const std::string& name) {
  auto method = irfs::Method::parse(name);
  if (!method) {
    throw CLI::ValidationError("--method",
                               "unknown method '" + name + "'; valid methods: " +
                                   std::string(irfs::kMethodNames));
  }
  return *method;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* flag) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not an integer");
    }
  }
  if (out.empty()) {
    throw CLI::ValidationError(flag, "expected a comma-separated list of integers");
  }
  return out;
}

irfs::SynthSpec::ImageCountLaw parse_image_law(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "zipf") {
    try {
      return irfs::SynthSpec::ImageCountLaw::zipf(std::stod(arg));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--image-law", "usage: zipf:<exponent>");
    }
  }
  if (kind == "explicit") {
    return irfs::SynthSpec::ImageCountLaw::explicit_counts(
        parse_int_list(arg, "--image-law"));
  }
  throw CLI::ValidationError("--image-law", "expected zipf:<exponent> or explicit:<n1,n2,...>");
}

irfs::SynthSpec::InstanceLaw parse_instance_law(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "constant") {
      return irfs::SynthSpec::InstanceLaw::constant_per_occurrence(std::stoll(arg));
    }
    if (kind == "geometric") {
      return irfs::SynthSpec::InstanceLaw::geometric(std::stod(arg));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--instance-law", "usage: constant:<k> or geometric:<p>");
  }
  if (kind == "explicit") {
    return irfs::SynthSpec::InstanceLaw::explicit_per_category(
        parse_int_list(arg, "--instance-law"));
  }
  throw CLI::ValidationError(
      "--instance-law", "expected constant:<k>, geometric:<p> or explicit:<n1,n2,...>");
}

struct CommonOptions {
  std::string input;
  std::string method_name = "rfs";
  double threshold = irfs::kDefaultThreshold;
  bool strict = true;
  int threads = 1;
};

void add_input_flags(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("input", opts->input, "annotation JSON file")->required();
  cmd->add_flag("--strict,!--no-strict", opts->strict,
                "fail on dangling references (default) or drop them");
}

void add_method_flags(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--method", opts->method_name,
                  std::string("sampling method (") + irfs::kMethodNames + ")");
  cmd->add_option("--t", opts->threshold, "oversampling threshold; 0 disables re-sampling")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", opts->threads, "worker threads for factor computation")
      ->check(CLI::PositiveNumber);
}

irfs::Dataset load_input(const CommonOptions& opts) {
  irfs::Dataset ds = irfs::load_dataset(opts.input, opts.strict);
  if (ds.dropped_instances() > 0) {
    std::cerr << "warning: dropped " << ds.dropped_instances()
              << " annotations with dangling references\n";
  }
  return ds;
}

int run_analyze(const CommonOptions& opts, const std::string& out, const std::string& format) {
  const irfs::Dataset ds = load_input(opts);
  const irfs::FrequencyTable table = irfs::compute_frequencies(ds);
  OutputTarget target(out);
  if (format == "csv") {
    irfs::write_frequency_csv(table, target.stream());
  } else {
    target.stream() << irfs::frequency_to_json(table).dump(2) << "\n";
  }
  return kExitOk;
}

int run_factors(const CommonOptions& opts, const std::string& categories_out,
                const std::string& images_out, const std::string& format) {
  const irfs::SamplerConfig cfg{parse_method_or_throw(opts.method_name), opts.threshold};
  const irfs::Dataset ds = load_input(opts);
  const irfs::FrequencyTable freq = irfs::compute_frequencies(ds);
  const irfs::RepeatFactorTable rft = irfs::compute_repeat_factors(freq, cfg, opts.threads);
  const irfs::ImageRepeatTable irt = irfs::image_repeat_factors(ds, rft, opts.threads);

  {
    OutputTarget target(categories_out);
    if (format == "csv") {
      irfs::write_repeat_factors_csv(rft, target.stream());
    } else {
      irfs::write_repeat_factors_json(rft, target.stream());
    }
  }
  if (!images_out.empty()) {
    OutputTarget target(images_out);
    if (format == "csv") {
      irfs::write_image_factors_csv(irt, target.stream());
    } else {
      irfs::write_image_factors_json(irt, target.stream());
    }
  }
  return kExitOk;
}

int run_sample(const CommonOptions& opts, std::uint64_t seed, std::int64_t epochs,
               std::int64_t epoch_start, const std::string& out_dir, const std::string& format) {
  const irfs::SamplerConfig cfg{parse_method_or_throw(opts.method_name), opts.threshold};
  const irfs::Dataset ds = load_input(opts);
  const irfs::FrequencyTable freq = irfs::compute_frequencies(ds);
  const irfs::RepeatFactorTable rft = irfs::compute_repeat_factors(freq, cfg, opts.threads);
  const irfs::ImageRepeatTable irt = irfs::image_repeat_factors(ds, rft, opts.threads);

  std::filesystem::create_directories(out_dir);
  // One epoch at a time: memory stays bounded by a single sample list.
  for (std::int64_t e = epoch_start; e < epoch_start + epochs; ++e) {
    const irfs::EpochSample epoch = irfs::sample_epoch(irt, seed, e, opts.threads);
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%04lld.%s", static_cast<long long>(e),
                  format == "json" ? "json" : "txt");
    std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
    if (!out) {
      throw irfs::Error(irfs::ErrorCode::FileNotFound,
                        "cannot write epoch file in '" + out_dir + "'");
    }
    if (format == "json") {
      irfs::write_epoch_json(epoch, out);
    } else {
      irfs::write_epoch_ids(epoch, out);
    }
  }
  return kExitOk;
}

int run_synth(std::int64_t categories, std::int64_t images, const std::string& image_law,
              const std::string& instance_law, std::uint64_t seed, const std::string& out) {
  irfs::SynthSpec spec;
  spec.num_categories = categories;
  spec.num_images = images;
  spec.image_count_law = parse_image_law(image_law);
  spec.instance_law = parse_instance_law(instance_law);
  spec.seed = seed;

  const irfs::Dataset ds = irfs::generate(spec);
  OutputTarget target(out);
  irfs::write_coco_json(ds, target.stream());
  std::cerr << "synthesized " << ds.image_count() << " images, " << ds.instance_count()
            << " annotations, " << ds.category_count() << " categories ("
            << ds.source_digest_hex() << ")\n";
  return kExitOk;
}

int run_report(const CommonOptions& opts, const std::vector<std::string>& methods,
               std::vector<double> thresholds, const std::string& out, const std::string& format,
               const std::optional<std::pair<std::size_t, std::size_t>>& diff,
               const std::string& diff_out) {
  std::vector<irfs::SamplerConfig> configs;
  if (thresholds.empty()) thresholds.push_back(opts.threshold);
  if (thresholds.size() == 1) thresholds.resize(methods.size(), thresholds.front());
  if (thresholds.size() != methods.size()) {
    throw CLI::ValidationError("--t", "give one threshold or one per method");
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (thresholds[i] < 0) throw CLI::ValidationError("--t", "threshold must be >= 0");
    configs.push_back({parse_method_or_throw(methods[i]), thresholds[i]});
  }

  const irfs::Dataset ds = load_input(opts);
  const irfs::BalanceReport report = irfs::build_report(ds, configs);

  {
    OutputTarget target(out);
    if (format == "csv") {
      irfs::write_report_csv(report, target.stream());
    } else if (format == "json") {
      target.stream() << irfs::report_to_json(report).dump(2) << "\n";
    } else {
      irfs::write_report_table(report, target.stream());
    }
  }

  if (diff) {
    if (diff->first >= configs.size() || diff->second >= configs.size()) {
      throw CLI::ValidationError("--diff", "method index out of range");
    }
    const irfs::MethodDelta delta = irfs::diff_methods(report, diff->first, diff->second);
    OutputTarget target(diff_out);
    if (format == "csv") {
      irfs::write_delta_csv(delta, report.source_digest, target.stream());
    } else {
      target.stream() << irfs::delta_to_json(delta, report.source_digest).dump(2) << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeat-factor computation and re-sampling for long-tailed detection datasets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(irfs::kToolName) + " " + irfs::kToolVersion);

  CommonOptions analyze_opts;
  std::string analyze_out = "-";
  std::string analyze_format = "json";
  auto* analyze = app.add_subcommand("analyze", "per-category frequencies and buckets");
  add_input_flags(analyze, &analyze_opts);
  analyze->add_option("--out", analyze_out, "output path, or - for stdout");
  analyze->add_option("--format", analyze_format)->check(CLI::IsMember({"json", "csv"}));

  CommonOptions factors_opts;
  std::string categories_out = "-";
  std::string images_out;
  std::string factors_format = "json";
  auto* factors = app.add_subcommand("factors", "category and image repeat factors");
  add_input_flags(factors, &factors_opts);
  add_method_flags(factors, &factors_opts);
  factors->add_option("--categories-out", categories_out, "category factor table path");
  factors->add_option("--images-out", images_out, "image factor table path (omit to skip)");
  factors->add_option("--format", factors_format)->check(CLI::IsMember({"json", "csv"}));

  CommonOptions sample_opts;
  std::uint64_t seed = 0;
  std::int64_t epochs = 1;
  std::int64_t epoch_start = 0;
  std::string sample_dir;
  std::string sample_format = "ids";
  auto* sample = app.add_subcommand("sample", "materialize seeded per-epoch image lists");
  add_input_flags(sample, &sample_opts);
  add_method_flags(sample, &sample_opts);
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_option("--epochs", epochs, "number of epochs to materialize")
      ->check(CLI::PositiveNumber);
  sample->add_option("--epoch-start", epoch_start, "index of the first epoch")
      ->check(CLI::NonNegativeNumber);
  sample->add_option("--out-dir", sample_dir, "directory for epoch files")->required();
  sample->add_option("--format", sample_format)->check(CLI::IsMember({"ids", "json"}));

  std::int64_t synth_categories = 1;
  std::int64_t synth_images = 1;
  std::string synth_image_law = "zipf:1.0";
  std::string synth_instance_law = "constant:1";
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic long-tailed annotation file");
  synth->add_option("--categories", synth_categories, "number of categories")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--images", synth_images, "number of images")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--image-law", synth_image_law,
                    "zipf:<exponent> or explicit:<n1,n2,...> images per category");
  synth->add_option("--instance-law", synth_instance_law,
                    "constant:<k>, geometric:<p> or explicit:<k1,k2,...> instances per occurrence");
  synth->add_option("--seed", synth_seed, "generation seed");
  synth->add_option("--out", synth_out, "output annotation JSON path, or - for stdout")
      ->required();

  CommonOptions report_opts;
  std::vector<std::string> report_methods;
  std::vector<double> report_thresholds;
  std::string report_out = "-";
  std::string report_format = "table";
  std::vector<std::size_t> diff_indices;
  std::string diff_out = "-";
  auto* report = app.add_subcommand("report", "balance analysis across sampler configurations");
  add_input_flags(report, &report_opts);
  report->add_option("--method", report_methods, "methods to compare (repeatable)")
      ->required()
      ->expected(-1);
  report->add_option("--t", report_thresholds, "threshold per method, or one for all")
      ->expected(-1);
  report->add_option("--out", report_out, "output path, or - for stdout");
  report->add_option("--format", report_format)->check(CLI::IsMember({"json", "csv", "table"}));
  report->add_option("--diff", diff_indices, "two method indices to difference")->expected(2);
  report->add_option("--diff-out", diff_out, "delta table path, or - for stdout");

  try {
    app.parse(argc, argv);

    if (analyze->parsed()) return run_analyze(analyze_opts, analyze_out, analyze_format);
    if (factors->parsed()) {
      return run_factors(factors_opts, categories_out, images_out, factors_format);
    }
    if (sample->parsed()) {
      return run_sample(sample_opts, seed, epochs, epoch_start, sample_dir, sample_format);
    }
    if (synth->parsed()) {
      return run_synth(synth_categories, synth_images, synth_image_law, synth_instance_law,
                       synth_seed, synth_out);
    }
    if (report->parsed()) {
      std::optional<std::pair<std::size_t, std::size_t>> diff;
      if (!diff_indices.empty()) diff = {diff_indices[0], diff_indices[1]};
      return run_report(report_opts, report_methods, report_thresholds, report_out,
                        report_format, diff, diff_out);
    }
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const irfs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
