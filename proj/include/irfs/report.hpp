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

#pragma once

#include <array>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irfs/annotations.hpp"
#include "irfs/detail/format.hpp"
#include "irfs/error.hpp"
#include "irfs/frequency.hpp"
#include "irfs/repeat_factor.hpp"
#include "irfs/sampler.hpp"
#include "irfs/version.hpp"

namespace irfs {

inline constexpr std::array<FrequencyBucket, 4> kAllBuckets = {
    FrequencyBucket::Rare, FrequencyBucket::Common, FrequencyBucket::Frequent,
    FrequencyBucket::Empty};

struct BucketRow {
  FrequencyBucket bucket = FrequencyBucket::Empty;
  std::int64_t categories = 0;
  std::int64_t image_count = 0;     // summed over the bucket's categories
  std::int64_t instance_count = 0;  // summed over the bucket's categories
  std::optional<double> mean_r;     // over defined factors; nullopt if none
  std::optional<double> max_r;
  double exposure_before = 0.0;  // equals image_count by construction
  double exposure_after = 0.0;
};

struct CategoryReportRow {
  Id category_id = 0;
  std::string name;
  FrequencyBucket bucket = FrequencyBucket::Empty;
  std::optional<double> r;
  std::int64_t exposure_before = 0;  // raw image count
  double exposure_after = 0.0;
};

struct MethodReport {
  SamplerConfig config;
  std::vector<BucketRow> buckets;  // in kAllBuckets order
  std::vector<CategoryReportRow> categories;
};

// Balance analysis of one dataset under one or more sampler configurations.
// Every number is recomputed from the frequency/factor modules; the report
// performs no arithmetic of its own beyond aggregation.
struct BalanceReport {
  std::uint64_t source_digest = 0;
  std::int64_t total_images = 0;
  std::int64_t total_instances = 0;
  std::int64_t total_categories = 0;
  FrequencyTable frequencies;
  std::vector<MethodReport> methods;
};

inline BalanceReport build_report(const Dataset& ds, const std::vector<SamplerConfig>& configs) {
  if (configs.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no sampler configurations given");
  }
  BalanceReport report;
  report.source_digest = ds.source_digest();
  report.total_images = ds.image_count();
  report.total_instances = ds.instance_count();
  report.total_categories = ds.category_count();
  report.frequencies = compute_frequencies(ds);

  for (const auto& cfg : configs) {
    const RepeatFactorTable rft = compute_repeat_factors(report.frequencies, cfg);
    const ImageRepeatTable irt = image_repeat_factors(ds, rft);
    const std::vector<CategoryExposure> exposure = expected_exposure(ds, irt, report.frequencies);

    MethodReport method;
    method.config = cfg;
    method.categories.resize(report.frequencies.categories.size());
    for (std::size_t i = 0; i < report.frequencies.categories.size(); ++i) {
      const auto& freq = report.frequencies.categories[i];
      auto& row = method.categories[i];
      row.category_id = freq.category_id;
      row.name = freq.name;
      row.bucket = bucket_of(freq);
      row.r = rft.categories[i].r;
      row.exposure_before = exposure[i].image_count;
      row.exposure_after = exposure[i].expected;
    }

    for (FrequencyBucket bucket : kAllBuckets) {
      BucketRow agg;
      agg.bucket = bucket;
      double r_sum = 0.0;
      std::int64_t r_count = 0;
      for (std::size_t i = 0; i < method.categories.size(); ++i) {
        const auto& row = method.categories[i];
        if (row.bucket != bucket) continue;
        const auto& freq = report.frequencies.categories[i];
        agg.categories++;
        agg.image_count += freq.image_count;
        agg.instance_count += freq.instance_count;
        agg.exposure_before += static_cast<double>(row.exposure_before);
        agg.exposure_after += row.exposure_after;
        if (row.r) {
          r_sum += *row.r;
          r_count++;
          if (!agg.max_r || *row.r > *agg.max_r) agg.max_r = *row.r;
        }
      }
      if (r_count > 0) agg.mean_r = r_sum / static_cast<double>(r_count);
      method.buckets.push_back(agg);
    }
    report.methods.push_back(std::move(method));
  }
  return report;
}

struct MethodDelta {
  SamplerConfig config_a;
  SamplerConfig config_b;
  struct Row {
    Id category_id = 0;
    std::string name;
    std::optional<double> delta_r;  // defined only when both factors are
    double delta_exposure = 0.0;
  };
  std::vector<Row> rows;
};

// Per-category differences between two comparison blocks: r(a) - r(b) and
// exposure(a) - exposure(b). Antisymmetric in (a, b).
inline MethodDelta diff_methods(const BalanceReport& report, std::size_t a, std::size_t b) {
  if (a >= report.methods.size() || b >= report.methods.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "method index out of range (report holds " +
                    detail::format_int(report.methods.size()) + " blocks)");
  }
  const MethodReport& lhs = report.methods[a];
  const MethodReport& rhs = report.methods[b];
  MethodDelta delta;
  delta.config_a = lhs.config;
  delta.config_b = rhs.config;
  delta.rows.resize(lhs.categories.size());
  for (std::size_t i = 0; i < lhs.categories.size(); ++i) {
    auto& row = delta.rows[i];
    row.category_id = lhs.categories[i].category_id;
    row.name = lhs.categories[i].name;
    if (lhs.categories[i].r && rhs.categories[i].r) {
      row.delta_r = *lhs.categories[i].r - *rhs.categories[i].r;
    }
    row.delta_exposure = lhs.categories[i].exposure_after - rhs.categories[i].exposure_after;
  }
  return delta;
}

inline nlohmann::ordered_json report_to_json(const BalanceReport& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["source_digest"] = digest_hex(report.source_digest);
  doc["totals"] = {{"images", report.total_images},
                   {"instances", report.total_instances},
                   {"categories", report.total_categories}};

  auto& methods = doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& method : report.methods) {
    nlohmann::ordered_json block;
    block["config"] = {{"method", method.config.method.name()},
                       {"threshold_t", method.config.threshold_t}};
    auto& buckets = block["buckets"] = nlohmann::ordered_json::array();
    for (const auto& row : method.buckets) {
      nlohmann::ordered_json item;
      item["bucket"] = to_string(row.bucket);
      item["categories"] = row.categories;
      item["image_count"] = row.image_count;
      item["instance_count"] = row.instance_count;
      item["mean_r"] = row.mean_r ? nlohmann::ordered_json(*row.mean_r)
                                  : nlohmann::ordered_json(nullptr);
      item["max_r"] =
          row.max_r ? nlohmann::ordered_json(*row.max_r) : nlohmann::ordered_json(nullptr);
      item["exposure_before"] = row.exposure_before;
      item["exposure_after"] = row.exposure_after;
      buckets.push_back(std::move(item));
    }
    auto& rows = block["categories"] = nlohmann::ordered_json::array();
    for (const auto& row : method.categories) {
      nlohmann::ordered_json item;
      item["category_id"] = row.category_id;
      item["name"] = row.name;
      item["bucket"] = to_string(row.bucket);
      item["r"] = row.r ? nlohmann::ordered_json(*row.r) : nlohmann::ordered_json(nullptr);
      item["exposure_before"] = row.exposure_before;
      item["exposure_after"] = row.exposure_after;
      rows.push_back(std::move(item));
    }
    methods.push_back(std::move(block));
  }
  return doc;
}

// Plot-ready long format: one row per (method, category).
inline void write_report_csv(const BalanceReport& report, std::ostream& os) {
  os << "# " << kToolName << " " << kToolVersion << "\n"
     << "# source_digest=" << digest_hex(report.source_digest) << "\n"
     << "method,threshold_t,category_id,name,bucket,image_count,instance_count,"
        "f_image,f_instance,r,exposure_before,exposure_after\n";
  for (const auto& method : report.methods) {
    for (std::size_t i = 0; i < method.categories.size(); ++i) {
      const auto& row = method.categories[i];
      const auto& freq = report.frequencies.categories[i];
      os << method.config.method.name() << ','
         << detail::format_double(method.config.threshold_t) << ',' << row.category_id << ','
         << detail::csv_field(row.name) << ',' << to_string(row.bucket) << ','
         << freq.image_count << ',' << freq.instance_count << ','
         << detail::format_double(freq.f_image) << ',' << detail::format_double(freq.f_instance)
         << ',';
      if (row.r) os << detail::format_double(*row.r);
      os << ',' << row.exposure_before << ',' << detail::format_double(row.exposure_after)
         << "\n";
    }
  }
}

// Fixed-width summary for terminals. Presentation only; the JSON is the
// contract.
inline void write_report_table(const BalanceReport& report, std::ostream& os) {
  os << "dataset: " << report.total_images << " images, " << report.total_instances
     << " instances, " << report.total_categories << " categories ("
     << digest_hex(report.source_digest) << ")\n\n";
  std::ostringstream line;
  line << std::left << std::setw(18) << "method" << std::right << std::setw(10) << "t"
       << std::setw(10) << "bucket" << std::setw(7) << "cats" << std::setw(9) << "images"
       << std::setw(11) << "instances" << std::setw(9) << "mean_r" << std::setw(9) << "max_r"
       << std::setw(13) << "exp_before" << std::setw(13) << "exp_after";
  os << line.str() << "\n" << std::string(line.str().size(), '-') << "\n";
  for (const auto& method : report.methods) {
    for (const auto& row : method.buckets) {
      os << std::left << std::setw(18) << method.config.method.name() << std::right
         << std::setw(10) << detail::format_double(method.config.threshold_t) << std::setw(10)
         << to_string(row.bucket) << std::setw(7) << row.categories << std::setw(9)
         << row.image_count << std::setw(11) << row.instance_count;
      auto fixed3 = [](std::optional<double> v) -> std::string {
        if (!v) return "-";
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(3) << *v;
        return ss.str();
      };
      os << std::setw(9) << fixed3(row.mean_r) << std::setw(9) << fixed3(row.max_r)
         << std::setw(13) << fixed3(row.exposure_before) << std::setw(13)
         << fixed3(row.exposure_after) << "\n";
    }
  }
}

inline nlohmann::ordered_json delta_to_json(const MethodDelta& delta,
                                            std::uint64_t source_digest) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["source_digest"] = digest_hex(source_digest);
  doc["config_a"] = {{"method", delta.config_a.method.name()},
                     {"threshold_t", delta.config_a.threshold_t}};
  doc["config_b"] = {{"method", delta.config_b.method.name()},
                     {"threshold_t", delta.config_b.threshold_t}};
  auto& rows = doc["categories"] = nlohmann::ordered_json::array();
  for (const auto& row : delta.rows) {
    nlohmann::ordered_json item;
    item["category_id"] = row.category_id;
    item["name"] = row.name;
    item["delta_r"] =
        row.delta_r ? nlohmann::ordered_json(*row.delta_r) : nlohmann::ordered_json(nullptr);
    item["delta_exposure"] = row.delta_exposure;
    rows.push_back(std::move(item));
  }
  return doc;
}

inline void write_delta_csv(const MethodDelta& delta, std::uint64_t source_digest,
                            std::ostream& os) {
  os << "# " << kToolName << " " << kToolVersion << "\n"
     << "# source_digest=" << digest_hex(source_digest) << "\n"
     << "# a=" << delta.config_a.method.name()
     << " t=" << detail::format_double(delta.config_a.threshold_t)
     << " b=" << delta.config_b.method.name()
     << " t=" << detail::format_double(delta.config_b.threshold_t) << "\n"
     << "category_id,name,delta_r,delta_exposure\n";
  for (const auto& row : delta.rows) {
    os << row.category_id << ',' << detail::csv_field(row.name) << ',';
    if (row.delta_r) os << detail::format_double(*row.delta_r);
    os << ',' << detail::format_double(row.delta_exposure) << "\n";
  }
}

}  // namespace irfs
