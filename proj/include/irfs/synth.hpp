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
#include <numeric>
#include <string>
#include <vector>

#include "irfs/annotations.hpp"
#include "irfs/detail/format.hpp"
#include "irfs/error.hpp"
#include "irfs/random.hpp"

namespace irfs {

// Recipe for a synthetic long-tailed dataset. Image counts (how many images
// contain each category) and instances-per-occurrence (how many boxes a
// category places in each image it occupies) are controlled independently,
// so image-frequency and instance-frequency imbalance can be decoupled.
struct SynthSpec {
  struct ImageCountLaw {
    enum class Kind { Zipf, Explicit };
    Kind kind = Kind::Zipf;
    double zipf_exponent = 1.0;
    std::vector<std::int64_t> counts;  // per category, Kind::Explicit only

    static ImageCountLaw zipf(double exponent) { return {Kind::Zipf, exponent, {}}; }
    static ImageCountLaw explicit_counts(std::vector<std::int64_t> counts) {
      return {Kind::Explicit, 0.0, std::move(counts)};
    }
  };

  struct InstanceLaw {
    enum class Kind { Constant, Geometric, Explicit };
    Kind kind = Kind::Constant;
    std::int64_t constant = 1;
    double geometric_p = 0.5;
    std::vector<std::int64_t> per_category;  // Kind::Explicit only

    static InstanceLaw constant_per_occurrence(std::int64_t k) { return {Kind::Constant, k, 0.0, {}}; }
    static InstanceLaw geometric(double p) { return {Kind::Geometric, 1, p, {}}; }
    static InstanceLaw explicit_per_category(std::vector<std::int64_t> values) {
      return {Kind::Explicit, 1, 0.0, std::move(values)};
    }
  };

  std::int64_t num_categories = 1;
  std::int64_t num_images = 1;
  ImageCountLaw image_count_law;
  InstanceLaw instance_law;
  std::uint64_t seed = 0;
};

namespace detail {

// Target image count per category. Zipf decays from num_images at rank 1,
// floored at one image so every category occurs.
inline std::vector<std::int64_t> realized_image_counts(const SynthSpec& spec) {
  using Law = SynthSpec::ImageCountLaw::Kind;
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(spec.num_categories));
  if (spec.image_count_law.kind == Law::Explicit) {
    const auto& wanted = spec.image_count_law.counts;
    if (static_cast<std::int64_t>(wanted.size()) != spec.num_categories) {
      throw Error(ErrorCode::InfeasibleSpec,
                  "explicit image counts list has " + format_int(wanted.size()) +
                      " entries for " + format_int(spec.num_categories) + " categories");
    }
    for (std::int64_t c : wanted) {
      if (c < 0 || c > spec.num_images) {
        throw Error(ErrorCode::InfeasibleSpec,
                    "explicit image count " + format_int(c) + " outside [0, " +
                        format_int(spec.num_images) + "]");
      }
      counts.push_back(c);
    }
    return counts;
  }

  const double s = spec.image_count_law.zipf_exponent;
  if (!(s > 0.0)) {
    throw Error(ErrorCode::InfeasibleSpec, "zipf exponent must be positive");
  }
  for (std::int64_t rank = 1; rank <= spec.num_categories; ++rank) {
    const double raw =
        static_cast<double>(spec.num_images) * std::pow(static_cast<double>(rank), -s);
    auto count = static_cast<std::int64_t>(std::llround(raw));
    if (count < 1) count = 1;
    if (count > spec.num_images) count = spec.num_images;
    counts.push_back(count);
  }
  return counts;
}

inline std::int64_t draw_instances_per_occurrence(const SynthSpec::InstanceLaw& law,
                                                  std::size_t category_index,
                                                  rng::CounterRng& rng) {
  using Kind = SynthSpec::InstanceLaw::Kind;
  switch (law.kind) {
    case Kind::Constant:
      return law.constant;
    case Kind::Explicit:
      return law.per_category[category_index];
    case Kind::Geometric: {
      if (law.geometric_p >= 1.0) return 1;
      // Inverse CDF of the geometric distribution on {1, 2, ...}.
      const double u = rng.next_unit();
      const double n = 1.0 + std::floor(std::log1p(-u) / std::log1p(-law.geometric_p));
      return n < 1.0 ? 1 : static_cast<std::int64_t>(n);
    }
  }
  return 1;
}

inline void validate_instance_law(const SynthSpec& spec) {
  using Kind = SynthSpec::InstanceLaw::Kind;
  const auto& law = spec.instance_law;
  switch (law.kind) {
    case Kind::Constant:
      if (law.constant < 1) {
        throw Error(ErrorCode::InfeasibleSpec, "instances per occurrence must be >= 1");
      }
      break;
    case Kind::Geometric:
      if (!(law.geometric_p > 0.0) || law.geometric_p > 1.0) {
        throw Error(ErrorCode::InfeasibleSpec, "geometric parameter must lie in (0, 1]");
      }
      break;
    case Kind::Explicit:
      if (static_cast<std::int64_t>(law.per_category.size()) != spec.num_categories) {
        throw Error(ErrorCode::InfeasibleSpec,
                    "explicit instance list has " + format_int(law.per_category.size()) +
                        " entries for " + format_int(spec.num_categories) + " categories");
      }
      for (std::int64_t v : law.per_category) {
        if (v < 1) {
          throw Error(ErrorCode::InfeasibleSpec, "instances per occurrence must be >= 1");
        }
      }
      break;
  }
}

}  // namespace detail

// Deterministic under spec.seed. Each category's images are drawn uniformly
// without replacement, so categories co-occur in images; images left without
// any occurrence stay in the dataset as annotation-free images.
inline Dataset generate(const SynthSpec& spec) {
  if (spec.num_categories < 1) {
    throw Error(ErrorCode::InfeasibleSpec, "need at least one category");
  }
  if (spec.num_images < 1) {
    throw Error(ErrorCode::InfeasibleSpec, "need at least one image");
  }
  detail::validate_instance_law(spec);
  const std::vector<std::int64_t> image_counts = detail::realized_image_counts(spec);

  std::vector<Id> image_ids(static_cast<std::size_t>(spec.num_images));
  std::iota(image_ids.begin(), image_ids.end(), Id{1});

  std::vector<Category> categories;
  categories.reserve(static_cast<std::size_t>(spec.num_categories));
  for (std::int64_t c = 1; c <= spec.num_categories; ++c) {
    categories.push_back({c, "cat_" + detail::format_int(c)});
  }

  std::vector<InstanceRecord> instances;
  std::vector<Id> pool(image_ids);  // shared partial-shuffle pool
  std::vector<Id> chosen;
  Id next_annotation = 1;
  for (std::int64_t c = 0; c < spec.num_categories; ++c) {
    const auto want = static_cast<std::size_t>(image_counts[static_cast<std::size_t>(c)]);
    rng::CounterRng select(rng::key_of(
        {rng::kTagSynthImages, spec.seed, static_cast<std::uint64_t>(c + 1)}));
    chosen.clear();
    for (std::size_t j = 0; j < want; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(select.next_below(pool.size() - j));
      std::swap(pool[j], pool[pick]);
      chosen.push_back(pool[j]);
    }
    std::sort(chosen.begin(), chosen.end());

    rng::CounterRng occupancy(rng::key_of(
        {rng::kTagSynthInstances, spec.seed, static_cast<std::uint64_t>(c + 1)}));
    for (Id image : chosen) {
      const std::int64_t per_occurrence = detail::draw_instances_per_occurrence(
          spec.instance_law, static_cast<std::size_t>(c), occupancy);
      for (std::int64_t k = 0; k < per_occurrence; ++k) {
        instances.push_back({next_annotation++, image, categories[static_cast<std::size_t>(c)].id});
      }
    }
  }

  return Dataset::from_records(std::move(image_ids), std::move(instances),
                               std::move(categories));
}

}  // namespace irfs
