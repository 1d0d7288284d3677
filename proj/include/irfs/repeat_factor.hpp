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

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "irfs/annotations.hpp"
#include "irfs/detail/format.hpp"
#include "irfs/detail/parallel.hpp"
#include "irfs/error.hpp"
#include "irfs/frequency.hpp"
#include "irfs/version.hpp"

namespace irfs {

// How the image fraction and the instance fraction of a category are fused
// into one effective frequency. For positive x != y the four means order as
// harmonic < geometric < arithmetic < quadratic.
enum class MeanKind { Geometric, Harmonic, Arithmetic, Quadratic };

inline const char* to_string(MeanKind m) {
  switch (m) {
    case MeanKind::Geometric: return "geometric";
    case MeanKind::Harmonic: return "harmonic";
    case MeanKind::Arithmetic: return "arithmetic";
    case MeanKind::Quadratic: return "quadratic";
  }
  return "?";
}

// Re-sampling method. Rfs uses the image fraction alone, InstanceOnly the
// instance fraction alone, Irfs a mean of the two.
struct Method {
  enum class Kind { Rfs, Irfs, InstanceOnly };

  Kind kind = Kind::Rfs;
  MeanKind mean = MeanKind::Geometric;  // meaningful only when kind == Irfs

  static Method rfs() { return {Kind::Rfs, MeanKind::Geometric}; }
  static Method irfs(MeanKind m) { return {Kind::Irfs, m}; }
  static Method instance_only() { return {Kind::InstanceOnly, MeanKind::Geometric}; }

  std::string name() const {
    switch (kind) {
      case Kind::Rfs: return "rfs";
      case Kind::InstanceOnly: return "instance-only";
      case Kind::Irfs: return std::string("irfs-") + to_string(mean);
    }
    return "?";
  }

  static std::optional<Method> parse(std::string_view name) {
    if (name == "rfs") return rfs();
    if (name == "instance-only") return instance_only();
    if (name == "irfs-geometric") return irfs(MeanKind::Geometric);
    if (name == "irfs-harmonic") return irfs(MeanKind::Harmonic);
    if (name == "irfs-arithmetic") return irfs(MeanKind::Arithmetic);
    if (name == "irfs-quadratic") return irfs(MeanKind::Quadratic);
    return std::nullopt;
  }

  friend bool operator==(const Method&, const Method&) = default;
};

inline constexpr const char* kMethodNames =
    "rfs, irfs-geometric, irfs-harmonic, irfs-arithmetic, irfs-quadratic, instance-only";

inline constexpr double kDefaultThreshold = 1e-3;

// threshold_t controls where oversampling engages: categories whose effective
// frequency is at or above it keep factor 1. t == 0 disables re-sampling.
struct SamplerConfig {
  Method method;
  double threshold_t = kDefaultThreshold;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

// Effective frequency of one category under the given method, or nullopt when
// a required fraction is zero (a category absent from training cannot be
// oversampled).
inline std::optional<double> effective_frequency(const CategoryFrequency& freq, Method method) {
  const double fi = freq.f_image;
  const double fb = freq.f_instance;
  switch (method.kind) {
    case Method::Kind::Rfs:
      if (fi == 0.0) return std::nullopt;
      return fi;
    case Method::Kind::InstanceOnly:
      if (fb == 0.0) return std::nullopt;
      return fb;
    case Method::Kind::Irfs: {
      if (fi == 0.0 || fb == 0.0) return std::nullopt;
      switch (method.mean) {
        case MeanKind::Geometric: return std::sqrt(fi * fb);
        case MeanKind::Harmonic: return 2.0 * fi * fb / (fi + fb);
        case MeanKind::Arithmetic: return (fi + fb) / 2.0;
        case MeanKind::Quadratic: return std::sqrt((fi * fi + fb * fb) / 2.0);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Category-level repeat factor: max(1, sqrt(t / f_eff)).
inline std::optional<double> category_repeat_factor(const CategoryFrequency& freq,
                                                    const SamplerConfig& cfg) {
  const auto f_eff = effective_frequency(freq, cfg.method);
  if (!f_eff) return std::nullopt;
  const double r = std::sqrt(cfg.threshold_t / *f_eff);
  return r > 1.0 ? r : 1.0;
}

struct CategoryRepeat {
  Id category_id = 0;
  std::optional<double> r;  // nullopt: category has no occurrences
};

struct RepeatFactorTable {
  std::vector<CategoryRepeat> categories;  // sorted by category id
  SamplerConfig config;
  std::uint64_t source_digest = 0;
};

inline RepeatFactorTable compute_repeat_factors(const FrequencyTable& table,
                                                const SamplerConfig& cfg, int threads = 1) {
  if (table.categories.empty()) {
    throw Error(ErrorCode::EmptyDataset, "frequency table has no categories");
  }
  RepeatFactorTable out;
  out.config = cfg;
  out.source_digest = table.source_digest;
  out.categories.resize(table.categories.size());
  const auto n = static_cast<std::int64_t>(table.categories.size());
  detail::parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      out.categories[i].category_id = table.categories[i].category_id;
      out.categories[i].r = category_repeat_factor(table.categories[i], cfg);
    }
  });
  return out;
}

struct ImageRepeat {
  Id image_id = 0;
  double r = 1.0;
};

struct ImageRepeatTable {
  std::vector<ImageRepeat> images;  // sorted by image id
  SamplerConfig config;
  std::uint64_t source_digest = 0;
};

// Image-level factor: the maximum defined category factor over the categories
// labeled in the image; 1 when none is defined (including annotation-free
// images).
inline ImageRepeatTable image_repeat_factors(const Dataset& ds, const RepeatFactorTable& rft,
                                             int threads = 1) {
  if (rft.source_digest != ds.source_digest()) {
    throw Error(ErrorCode::ProvenanceMismatch,
                "repeat factor table digest " + digest_hex(rft.source_digest) +
                    " does not match dataset digest " + digest_hex(ds.source_digest()));
  }

  // Align factors with the dataset's category order before the parallel loop;
  // worker threads must not throw.
  std::vector<std::optional<double>> factor_by_position(ds.categories().size());
  std::vector<bool> covered(ds.categories().size(), false);
  for (const auto& row : rft.categories) {
    const Category* cat = ds.find_category(row.category_id);
    if (cat == nullptr) {
      throw Error(ErrorCode::ProvenanceMismatch,
                  "factor table lists category " + detail::format_int(row.category_id) +
                      " that is absent from the dataset");
    }
    const std::size_t pos = ds.category_position(row.category_id);
    factor_by_position[pos] = row.r;
    covered[pos] = true;
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      throw Error(ErrorCode::ProvenanceMismatch,
                  "factor table is missing category " +
                      detail::format_int(ds.categories()[i].id));
    }
  }

  ImageRepeatTable out;
  out.config = rft.config;
  out.source_digest = rft.source_digest;
  out.images.resize(ds.images().size());
  const auto n = static_cast<std::int64_t>(ds.images().size());
  detail::parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const auto& img = ds.images()[i];
      double r = 1.0;
      for (Id cat : img.category_ids) {
        const auto& factor = factor_by_position[ds.category_position(cat)];
        if (factor && *factor > r) r = *factor;
      }
      out.images[i] = {img.id, r};
    }
  });
  return out;
}

namespace detail {

inline void write_provenance_comments(const SamplerConfig& cfg, std::uint64_t digest,
                                      std::ostream& os) {
  os << "# " << kToolName << " " << kToolVersion << "\n"
     << "# source_digest=" << digest_hex(digest) << "\n"
     << "# method=" << cfg.method.name() << "\n"
     << "# threshold_t=" << format_double(cfg.threshold_t) << "\n";
}

inline std::string provenance_json_prefix(const SamplerConfig& cfg, std::uint64_t digest) {
  std::string out = "{\"schema_version\":";
  out += format_int(kSchemaVersion);
  out += ",\"tool\":{\"name\":\"";
  out += kToolName;
  out += "\",\"version\":\"";
  out += kToolVersion;
  out += "\"},\"source_digest\":\"";
  out += digest_hex(digest);
  out += "\",\"config\":{\"method\":\"";
  out += cfg.method.name();
  out += "\",\"threshold_t\":";
  out += format_double(cfg.threshold_t);
  out += "}";
  return out;
}

}  // namespace detail

inline void write_repeat_factors_csv(const RepeatFactorTable& table, std::ostream& os) {
  detail::write_provenance_comments(table.config, table.source_digest, os);
  os << "category_id,r\n";
  for (const auto& row : table.categories) {
    os << row.category_id << ',';
    if (row.r) os << detail::format_double(*row.r);
    os << "\n";
  }
}

inline void write_repeat_factors_json(const RepeatFactorTable& table, std::ostream& os) {
  std::string buf = detail::provenance_json_prefix(table.config, table.source_digest);
  buf += ",\"categories\":[";
  bool first = true;
  for (const auto& row : table.categories) {
    if (!first) buf += ',';
    first = false;
    buf += "{\"category_id\":";
    buf += detail::format_int(row.category_id);
    buf += ",\"r\":";
    buf += row.r ? detail::format_double(*row.r) : "null";
    buf += '}';
  }
  buf += "]}\n";
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_image_factors_csv(const ImageRepeatTable& table, std::ostream& os) {
  detail::write_provenance_comments(table.config, table.source_digest, os);
  std::string buf = "image_id,r\n";
  buf.reserve(1 << 20);
  for (const auto& row : table.images) {
    buf += detail::format_int(row.image_id);
    buf += ',';
    buf += detail::format_double(row.r);
    buf += '\n';
    if (buf.size() > (1 << 20) - 64) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_image_factors_json(const ImageRepeatTable& table, std::ostream& os) {
  std::string buf = detail::provenance_json_prefix(table.config, table.source_digest);
  buf += ",\"images\":[";
  buf.reserve(1 << 20);
  bool first = true;
  for (const auto& row : table.images) {
    if (!first) buf += ',';
    first = false;
    buf += "{\"image_id\":";
    buf += detail::format_int(row.image_id);
    buf += ",\"r\":";
    buf += detail::format_double(row.r);
    buf += '}';
    if (buf.size() > (1 << 20) - 64) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  buf += "]}\n";
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace irfs
