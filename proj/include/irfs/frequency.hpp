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

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irfs/annotations.hpp"
#include "irfs/detail/format.hpp"
#include "irfs/error.hpp"
#include "irfs/version.hpp"

namespace irfs {

// LVIS-style buckets keyed on per-category image count:
// Rare 1..10, Common 11..100, Frequent >100. Categories that never occur get
// their own bucket so they cannot distort rare-class statistics.
enum class FrequencyBucket { Rare, Common, Frequent, Empty };

inline const char* to_string(FrequencyBucket b) {
  switch (b) {
    case FrequencyBucket::Rare: return "rare";
    case FrequencyBucket::Common: return "common";
    case FrequencyBucket::Frequent: return "frequent";
    case FrequencyBucket::Empty: return "empty";
  }
  return "?";
}

struct CategoryFrequency {
  Id category_id = 0;
  std::string name;
  std::int64_t image_count = 0;     // images containing >=1 instance of c
  std::int64_t instance_count = 0;  // instances of c
  double f_image = 0.0;             // image_count / total images
  double f_instance = 0.0;          // instance_count / total instances
};

struct FrequencyTable {
  std::vector<CategoryFrequency> categories;  // sorted by category id
  std::int64_t total_images = 0;
  std::int64_t total_instances = 0;
  std::uint64_t source_digest = 0;
};

inline FrequencyBucket bucket_of(const CategoryFrequency& freq) {
  if (freq.image_count == 0) return FrequencyBucket::Empty;
  if (freq.image_count <= 10) return FrequencyBucket::Rare;
  if (freq.image_count <= 100) return FrequencyBucket::Common;
  return FrequencyBucket::Frequent;
}

inline FrequencyTable compute_frequencies(const Dataset& ds) {
  if (ds.image_count() == 0) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no images");
  }
  if (ds.instance_count() == 0) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no annotations");
  }

  FrequencyTable table;
  table.total_images = ds.image_count();
  table.total_instances = ds.instance_count();
  table.source_digest = ds.source_digest();
  table.categories.resize(ds.categories().size());
  for (std::size_t i = 0; i < ds.categories().size(); ++i) {
    table.categories[i].category_id = ds.categories()[i].id;
    table.categories[i].name = ds.categories()[i].name;
  }

  for (const auto& inst : ds.instances()) {
    table.categories[ds.category_position(inst.category_id)].instance_count++;
  }
  for (const auto& img : ds.images()) {
    for (Id cat : img.category_ids) {
      table.categories[ds.category_position(cat)].image_count++;
    }
  }

  const auto images = static_cast<double>(table.total_images);
  const auto instances = static_cast<double>(table.total_instances);
  for (auto& row : table.categories) {
    row.f_image = static_cast<double>(row.image_count) / images;
    row.f_instance = static_cast<double>(row.instance_count) / instances;
  }
  return table;
}

inline void write_frequency_csv(const FrequencyTable& table, std::ostream& os) {
  os << "# " << kToolName << " " << kToolVersion << "\n"
     << "# source_digest=" << digest_hex(table.source_digest) << "\n"
     << "# total_images=" << table.total_images
     << " total_instances=" << table.total_instances << "\n"
     << "category_id,name,image_count,instance_count,f_image,f_instance,bucket\n";
  for (const auto& row : table.categories) {
    os << row.category_id << ',' << detail::csv_field(row.name) << ',' << row.image_count << ','
       << row.instance_count << ',' << detail::format_double(row.f_image) << ','
       << detail::format_double(row.f_instance) << ',' << to_string(bucket_of(row)) << "\n";
  }
}

inline nlohmann::ordered_json frequency_to_json(const FrequencyTable& table) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["source_digest"] = digest_hex(table.source_digest);
  doc["total_images"] = table.total_images;
  doc["total_instances"] = table.total_instances;
  auto& rows = doc["categories"] = nlohmann::ordered_json::array();
  for (const auto& row : table.categories) {
    rows.push_back({{"category_id", row.category_id},
                    {"name", row.name},
                    {"image_count", row.image_count},
                    {"instance_count", row.instance_count},
                    {"f_image", row.f_image},
                    {"f_instance", row.f_instance},
                    {"bucket", to_string(bucket_of(row))}});
  }
  return doc;
}

}  // namespace irfs
