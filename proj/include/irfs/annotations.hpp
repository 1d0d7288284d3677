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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "irfs/detail/format.hpp"
#include "irfs/digest.hpp"
#include "irfs/error.hpp"

namespace irfs {

using Id = std::int64_t;

struct Category {
  Id id = 0;
  std::string name;
};

struct ImageRecord {
  Id id = 0;
  // Distinct ids of the categories labeled in this image, sorted ascending.
  // Derived from the instances; empty for annotation-free images.
  std::vector<Id> category_ids;
};

struct InstanceRecord {
  Id id = 0;
  Id image_id = 0;
  Id category_id = 0;
};

// Immutable, validated view of a COCO/LVIS-style annotation file. All
// collections are sorted by id; foreign keys are guaranteed to resolve.
// Safe to share across threads after construction.
class Dataset {
 public:
  // Builds and validates a dataset from raw records. When `source_digest` is
  // absent, the digest is computed over the canonical serialization (the
  // exact bytes write_coco_json would emit).
  static Dataset from_records(std::vector<Id> image_ids,
                              std::vector<InstanceRecord> instances,
                              std::vector<Category> categories,
                              std::optional<std::uint64_t> source_digest = {},
                              std::int64_t dropped_instances = 0);

  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  const std::vector<InstanceRecord>& instances() const noexcept { return instances_; }
  const std::vector<Category>& categories() const noexcept { return categories_; }

  std::int64_t image_count() const noexcept { return static_cast<std::int64_t>(images_.size()); }
  std::int64_t instance_count() const noexcept { return static_cast<std::int64_t>(instances_.size()); }
  std::int64_t category_count() const noexcept { return static_cast<std::int64_t>(categories_.size()); }

  std::uint64_t source_digest() const noexcept { return source_digest_; }
  std::string source_digest_hex() const { return digest_hex(source_digest_); }

  // Number of annotations discarded by a non-strict load.
  std::int64_t dropped_instances() const noexcept { return dropped_instances_; }

  const ImageRecord* find_image(Id id) const {
    auto it = image_index_.find(id);
    return it == image_index_.end() ? nullptr : &images_[it->second];
  }

  const Category* find_category(Id id) const {
    auto it = category_index_.find(id);
    return it == category_index_.end() ? nullptr : &categories_[it->second];
  }

  std::size_t image_position(Id id) const {
    auto it = image_index_.find(id);
    if (it == image_index_.end()) {
      throw Error(ErrorCode::DanglingReference, "unknown image id " + detail::format_int(id));
    }
    return it->second;
  }

  std::size_t category_position(Id id) const {
    auto it = category_index_.find(id);
    if (it == category_index_.end()) {
      throw Error(ErrorCode::DanglingReference, "unknown category id " + detail::format_int(id));
    }
    return it->second;
  }

 private:
  Dataset() = default;

  std::vector<ImageRecord> images_;
  std::vector<InstanceRecord> instances_;
  std::vector<Category> categories_;
  std::unordered_map<Id, std::size_t> image_index_;
  std::unordered_map<Id, std::size_t> category_index_;
  std::uint64_t source_digest_ = 0;
  std::int64_t dropped_instances_ = 0;
};

struct DatasetSummary {
  std::int64_t image_count = 0;
  std::int64_t instance_count = 0;
  std::int64_t category_count = 0;
  // instances-per-image -> number of such images; values sum to image_count.
  std::map<std::int64_t, std::int64_t> instances_per_image;
};

namespace detail {

struct RawAnnotations {
  std::vector<Id> image_ids;
  std::vector<InstanceRecord> instances;
  std::vector<Category> categories;
};

// SAX handler that extracts only the fields the sampler needs (`id`,
// `image_id`, `category_id`, `name`) and skips everything else, so memory
// stays proportional to the record count regardless of how much geometry the
// file carries.
class CocoSax : public nlohmann::json_sax<nlohmann::json> {
 public:
  explicit CocoSax(RawAnnotations* out) : out_(out) {}

  bool saw_images = false;
  bool saw_annotations = false;
  bool saw_categories = false;

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }

  bool number_integer(number_integer_t val) override {
    reject_non_array_section();
    if (capturing()) assign_integer(val);
    return true;
  }

  bool number_unsigned(number_unsigned_t val) override {
    reject_non_array_section();
    if (capturing()) {
      if (val > static_cast<number_unsigned_t>(std::numeric_limits<Id>::max())) {
        fail_field("exceeds the supported id range");
      }
      assign_integer(static_cast<Id>(val));
    }
    return true;
  }

  bool number_float(number_float_t val, const string_t&) override {
    reject_non_array_section();
    if (capturing()) {
      // COCO exporters occasionally emit ids as integral floats.
      if (std::floor(val) != val || std::abs(val) > 0x1p53) {
        fail_field("must be an integer");
      }
      assign_integer(static_cast<Id>(val));
    }
    return true;
  }

  bool string(string_t& val) override {
    reject_non_array_section();
    if (capturing() && pending_ == Field::Name) {
      record_.name = std::move(val);
      record_.has_name = true;
    }
    pending_ = Field::None;
    return true;
  }

  bool binary(binary_t&) override { return scalar(); }

  bool start_object(std::size_t) override {
    ++level_;
    if (skip_from_ > 0) return true;
    reject_non_array_section();
    if (level_ == 1) return true;  // root
    if (level_ == 3 && in_section()) {
      record_ = Record{};
      return true;
    }
    if (level_ == 2 && in_section()) {
      throw Error(ErrorCode::SchemaViolation,
                  "'" + section_name() + "' elements must be objects");
    }
    skip_from_ = level_;  // nested object inside a record or unknown key
    return true;
  }

  bool key(string_t& val) override {
    if (skip_from_ > 0) return true;
    if (level_ == 1) {
      if (val == "images") {
        section_ = Section::Images;
        saw_images = true;
      } else if (val == "annotations") {
        section_ = Section::Annotations;
        saw_annotations = true;
      } else if (val == "categories") {
        section_ = Section::Categories;
        saw_categories = true;
      } else {
        section_ = Section::Other;
      }
      expect_section_array_ = section_ != Section::Other;
      return true;
    }
    if (level_ == 3 && in_section()) {
      pending_ = field_of(val);
    }
    return true;
  }

  bool end_object() override {
    if (skip_from_ == level_) skip_from_ = 0;
    if (skip_from_ == 0 && level_ == 3 && in_section()) emit_record();
    --level_;
    return true;
  }

  bool start_array(std::size_t) override {
    ++level_;
    if (skip_from_ > 0) return true;
    if (level_ == 1) {
      throw Error(ErrorCode::SchemaViolation, "top-level value must be an object");
    }
    if (level_ == 2 && expect_section_array_) {
      expect_section_array_ = false;  // the section's own array
      return true;
    }
    if (level_ == 3 && in_section()) {
      throw Error(ErrorCode::SchemaViolation,
                  "'" + section_name() + "' elements must be objects");
    }
    skip_from_ = level_;  // e.g. bbox / segmentation payloads
    return true;
  }

  bool end_array() override {
    if (skip_from_ == level_) skip_from_ = 0;
    if (skip_from_ == 0 && level_ == 2) section_ = Section::Other;
    --level_;
    return true;
  }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    throw Error(ErrorCode::MalformedJson,
                "at byte " + std::to_string(position) + ": " + ex.what());
  }

 private:
  enum class Section { None, Images, Annotations, Categories, Other };
  enum class Field { None, Id, ImageId, CategoryId, Name };

  struct Record {
    std::optional<Id> id;
    std::optional<Id> image_id;
    std::optional<Id> category_id;
    std::string name;
    bool has_name = false;
  };

  bool in_section() const {
    return section_ == Section::Images || section_ == Section::Annotations ||
           section_ == Section::Categories;
  }

  bool capturing() const {
    bool active = skip_from_ == 0 && level_ == 3 && in_section() && pending_ != Field::None;
    return active;
  }

  bool scalar() {
    reject_non_array_section();
    if (capturing()) fail_field("must be an integer");
    pending_ = Field::None;
    return true;
  }

  // Fires when a known section key ("images", ...) is followed by anything
  // other than an array, or a section array holds scalar elements. The flag
  // is set only at root-key time, so the very next value event is the
  // section's value.
  void reject_non_array_section() {
    if (skip_from_ > 0) return;
    if (expect_section_array_) {
      throw Error(ErrorCode::SchemaViolation, "'" + section_name() + "' must be an array");
    }
    if (level_ == 2 && in_section()) {
      throw Error(ErrorCode::SchemaViolation,
                  "'" + section_name() + "' elements must be objects");
    }
  }

  Field field_of(const std::string& key) const {
    switch (section_) {
      case Section::Images:
        if (key == "id") return Field::Id;
        break;
      case Section::Annotations:
        if (key == "id") return Field::Id;
        if (key == "image_id") return Field::ImageId;
        if (key == "category_id") return Field::CategoryId;
        break;
      case Section::Categories:
        if (key == "id") return Field::Id;
        if (key == "name") return Field::Name;
        break;
      default:
        break;
    }
    return Field::None;
  }

  std::string section_name() const {
    switch (section_) {
      case Section::Images: return "images";
      case Section::Annotations: return "annotations";
      case Section::Categories: return "categories";
      default: return "?";
    }
  }

  [[noreturn]] void fail_field(const std::string& what) {
    const char* field = pending_ == Field::Id ? "id"
                        : pending_ == Field::ImageId ? "image_id"
                        : pending_ == Field::CategoryId ? "category_id"
                                                        : "name";
    throw Error(ErrorCode::SchemaViolation,
                "'" + section_name() + "' field '" + field + "' " + what);
  }

  void assign_integer(Id value) {
    if (pending_ == Field::Name) fail_field("must be a string");
    if (value <= 0) fail_field("must be a positive integer");
    switch (pending_) {
      case Field::Id: record_.id = value; break;
      case Field::ImageId: record_.image_id = value; break;
      case Field::CategoryId: record_.category_id = value; break;
      default: break;
    }
    pending_ = Field::None;
  }

  void emit_record() {
    switch (section_) {
      case Section::Images:
        if (!record_.id) missing("id");
        out_->image_ids.push_back(*record_.id);
        break;
      case Section::Annotations: {
        if (!record_.id) missing("id");
        if (!record_.image_id) missing("image_id");
        if (!record_.category_id) missing("category_id");
        out_->instances.push_back({*record_.id, *record_.image_id, *record_.category_id});
        break;
      }
      case Section::Categories: {
        if (!record_.id) missing("id");
        if (!record_.has_name) missing("name");
        if (record_.name.empty()) {
          throw Error(ErrorCode::SchemaViolation,
                      "category " + detail::format_int(*record_.id) + " has an empty name");
        }
        out_->categories.push_back({*record_.id, std::move(record_.name)});
        break;
      }
      default:
        break;
    }
  }

  [[noreturn]] void missing(const char* field) {
    throw Error(ErrorCode::SchemaViolation, "'" + section_name() + "' entry #" +
                                                std::to_string(record_index()) +
                                                " is missing required key '" + field + "'");
  }

  std::size_t record_index() const {
    switch (section_) {
      case Section::Images: return out_->image_ids.size();
      case Section::Annotations: return out_->instances.size();
      case Section::Categories: return out_->categories.size();
      default: return 0;
    }
  }

  RawAnnotations* out_;
  Section section_ = Section::None;
  Field pending_ = Field::None;
  Record record_;
  int level_ = 0;      // container nesting depth
  int skip_from_ = 0;  // level at which an ignored container started, 0 = none
  bool expect_section_array_ = false;
};

}  // namespace detail

// Serializes the dataset in canonical form: compact JSON, records sorted by
// id, only the keys this library consumes, trailing newline. Datasets written
// this way reload with an identical digest.
inline void write_coco_json(const Dataset& ds, std::ostream& os) {
  std::string buf;
  buf.reserve(1 << 20);
  auto flush_if_full = [&] {
    if (buf.size() > (1 << 20) - 128) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  };

  buf += "{\"images\":[";
  bool first = true;
  for (const auto& img : ds.images()) {
    if (!first) buf += ',';
    first = false;
    buf += "{\"id\":";
    buf += detail::format_int(img.id);
    buf += '}';
    flush_if_full();
  }
  buf += "],\"annotations\":[";
  first = true;
  for (const auto& inst : ds.instances()) {
    if (!first) buf += ',';
    first = false;
    buf += "{\"id\":";
    buf += detail::format_int(inst.id);
    buf += ",\"image_id\":";
    buf += detail::format_int(inst.image_id);
    buf += ",\"category_id\":";
    buf += detail::format_int(inst.category_id);
    buf += '}';
    flush_if_full();
  }
  buf += "],\"categories\":[";
  first = true;
  for (const auto& cat : ds.categories()) {
    if (!first) buf += ',';
    first = false;
    buf += "{\"id\":";
    buf += detail::format_int(cat.id);
    buf += ",\"name\":";
    detail::append_json_string(buf, cat.name);
    buf += '}';
    flush_if_full();
  }
  buf += "]}\n";
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace detail {

// std::streambuf that hashes and discards, so canonical digests never need
// the serialized bytes in memory.
class HashingStreambuf : public std::streambuf {
 public:
  std::uint64_t value() const { return hasher_.value(); }

 protected:
  int overflow(int ch) override {
    if (ch != traits_type::eof()) {
      char c = static_cast<char>(ch);
      hasher_.update(&c, 1);
    }
    return ch;
  }

  std::streamsize xsputn(const char* s, std::streamsize n) override {
    hasher_.update(s, static_cast<std::size_t>(n));
    return n;
  }

 private:
  Fnv1a64 hasher_;
};

}  // namespace detail

inline Dataset Dataset::from_records(std::vector<Id> image_ids,
                                     std::vector<InstanceRecord> instances,
                                     std::vector<Category> categories,
                                     std::optional<std::uint64_t> source_digest,
                                     std::int64_t dropped_instances) {
  Dataset ds;

  std::sort(categories.begin(), categories.end(),
            [](const Category& a, const Category& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < categories.size(); ++i) {
    if (categories[i].id == categories[i - 1].id) {
      throw Error(ErrorCode::DuplicateId,
                  "duplicate category id " + detail::format_int(categories[i].id));
    }
  }
  for (const auto& cat : categories) {
    if (cat.id <= 0) {
      throw Error(ErrorCode::SchemaViolation,
                  "category id " + detail::format_int(cat.id) + " is not positive");
    }
    if (cat.name.empty()) {
      throw Error(ErrorCode::SchemaViolation,
                  "category " + detail::format_int(cat.id) + " has an empty name");
    }
  }

  std::sort(image_ids.begin(), image_ids.end());
  for (std::size_t i = 1; i < image_ids.size(); ++i) {
    if (image_ids[i] == image_ids[i - 1]) {
      throw Error(ErrorCode::DuplicateId,
                  "duplicate image id " + detail::format_int(image_ids[i]));
    }
  }
  for (Id id : image_ids) {
    if (id <= 0) {
      throw Error(ErrorCode::SchemaViolation,
                  "image id " + detail::format_int(id) + " is not positive");
    }
  }

  std::sort(instances.begin(), instances.end(),
            [](const InstanceRecord& a, const InstanceRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < instances.size(); ++i) {
    if (instances[i].id == instances[i - 1].id) {
      throw Error(ErrorCode::DuplicateId,
                  "duplicate annotation id " + detail::format_int(instances[i].id));
    }
  }

  ds.categories_ = std::move(categories);
  ds.category_index_.reserve(ds.categories_.size());
  for (std::size_t i = 0; i < ds.categories_.size(); ++i) {
    ds.category_index_.emplace(ds.categories_[i].id, i);
  }

  ds.images_.resize(image_ids.size());
  ds.image_index_.reserve(image_ids.size());
  for (std::size_t i = 0; i < image_ids.size(); ++i) {
    ds.images_[i].id = image_ids[i];
    ds.image_index_.emplace(image_ids[i], i);
  }

  for (const auto& inst : instances) {
    if (inst.id <= 0) {
      throw Error(ErrorCode::SchemaViolation,
                  "annotation id " + detail::format_int(inst.id) + " is not positive");
    }
    auto img = ds.image_index_.find(inst.image_id);
    if (img == ds.image_index_.end()) {
      throw Error(ErrorCode::DanglingReference,
                  "annotation " + detail::format_int(inst.id) + " references unknown image " +
                      detail::format_int(inst.image_id));
    }
    if (ds.category_index_.find(inst.category_id) == ds.category_index_.end()) {
      throw Error(ErrorCode::DanglingReference,
                  "annotation " + detail::format_int(inst.id) +
                      " references unknown category " + detail::format_int(inst.category_id));
    }
    ds.images_[img->second].category_ids.push_back(inst.category_id);
  }
  ds.instances_ = std::move(instances);
  ds.dropped_instances_ = dropped_instances;

  for (auto& img : ds.images_) {
    std::sort(img.category_ids.begin(), img.category_ids.end());
    img.category_ids.erase(std::unique(img.category_ids.begin(), img.category_ids.end()),
                           img.category_ids.end());
  }

  if (source_digest) {
    ds.source_digest_ = *source_digest;
  } else {
    detail::HashingStreambuf hashing;
    std::ostream sink(&hashing);
    write_coco_json(ds, sink);
    ds.source_digest_ = hashing.value();
  }
  return ds;
}

// Parses and validates a COCO/LVIS annotation file. In strict mode (the
// default) annotations with unresolvable references are fatal; otherwise they
// are dropped and reported through Dataset::dropped_instances().
inline Dataset load_dataset(const std::filesystem::path& path, bool strict = true) {
  const std::uint64_t digest = digest_of_file(path);

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
  }

  detail::RawAnnotations raw;
  detail::CocoSax handler(&raw);
  nlohmann::json::sax_parse(in, &handler);

  if (!handler.saw_images || !handler.saw_annotations || !handler.saw_categories) {
    std::string missing;
    if (!handler.saw_images) missing = "images";
    else if (!handler.saw_annotations) missing = "annotations";
    else missing = "categories";
    throw Error(ErrorCode::SchemaViolation, "missing top-level array '" + missing + "'");
  }

  std::int64_t dropped = 0;
  if (!strict) {
    std::unordered_set<Id> image_ids(raw.image_ids.begin(), raw.image_ids.end());
    std::unordered_set<Id> category_ids;
    category_ids.reserve(raw.categories.size());
    for (const auto& cat : raw.categories) category_ids.insert(cat.id);

    auto dangling = [&](const InstanceRecord& inst) {
      return image_ids.find(inst.image_id) == image_ids.end() ||
             category_ids.find(inst.category_id) == category_ids.end();
    };
    auto first_bad = std::remove_if(raw.instances.begin(), raw.instances.end(), dangling);
    dropped = std::distance(first_bad, raw.instances.end());
    raw.instances.erase(first_bad, raw.instances.end());
  }

  return Dataset::from_records(std::move(raw.image_ids), std::move(raw.instances),
                               std::move(raw.categories), digest, dropped);
}

inline DatasetSummary dataset_summary(const Dataset& ds) {
  DatasetSummary s;
  s.image_count = ds.image_count();
  s.instance_count = ds.instance_count();
  s.category_count = ds.category_count();

  std::vector<std::int64_t> per_image(ds.images().size(), 0);
  for (const auto& inst : ds.instances()) {
    per_image[ds.image_position(inst.image_id)]++;
  }
  for (std::int64_t n : per_image) {
    s.instances_per_image[n]++;
  }
  return s;
}

}  // namespace irfs
