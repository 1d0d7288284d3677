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
#include <map>
#include <ostream>
#include <vector>

#include "irfs/annotations.hpp"
#include "irfs/detail/format.hpp"
#include "irfs/detail/parallel.hpp"
#include "irfs/error.hpp"
#include "irfs/frequency.hpp"
#include "irfs/random.hpp"
#include "irfs/repeat_factor.hpp"

namespace irfs {

// One materialized training epoch. Every image appears floor(r_i) times plus
// one extra copy with probability frac(r_i); the expected per-epoch count is
// exactly r_i. The id order is a seeded shuffle of the repeated multiset.
struct EpochSample {
  std::int64_t epoch_index = 0;
  std::uint64_t seed = 0;
  SamplerConfig config;
  std::uint64_t source_digest = 0;
  std::vector<Id> image_ids;
  std::map<Id, std::int64_t> per_image_counts;
};

// (seed, epoch_index) fully determine the result. The extra-copy decision for
// an image is keyed on (seed, epoch_index, image_id), not on a sequential
// generator, so draws are independent of iteration order.
inline EpochSample sample_epoch(const ImageRepeatTable& irt, std::uint64_t seed,
                                std::int64_t epoch_index, int threads = 1) {
  if (irt.images.empty()) {
    throw Error(ErrorCode::EmptyDataset, "image repeat table is empty");
  }

  EpochSample epoch;
  epoch.epoch_index = epoch_index;
  epoch.seed = seed;
  epoch.config = irt.config;
  epoch.source_digest = irt.source_digest;

  const auto n = static_cast<std::int64_t>(irt.images.size());
  std::vector<std::int64_t> counts(irt.images.size());
  detail::parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const auto& row = irt.images[i];
      const double base = std::floor(row.r);
      const double frac = row.r - base;
      std::int64_t count = static_cast<std::int64_t>(base);
      if (frac > 0.0) {
        const std::uint64_t bits = rng::mix64(
            rng::key_of({rng::kTagExtraCopy, seed, static_cast<std::uint64_t>(epoch_index),
                         static_cast<std::uint64_t>(row.image_id)}));
        if (rng::to_unit(bits) < frac) ++count;
      }
      counts[i] = count;
    }
  });

  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  epoch.image_ids.reserve(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t k = 0; k < counts[i]; ++k) {
      epoch.image_ids.push_back(irt.images[i].image_id);
    }
    if (counts[i] > 0) epoch.per_image_counts[irt.images[i].image_id] = counts[i];
  }

  // Fisher-Yates with a counter-based stream; bit-identical on every run.
  rng::CounterRng shuffle(
      rng::key_of({rng::kTagShuffle, seed, static_cast<std::uint64_t>(epoch_index)}));
  for (std::size_t i = epoch.image_ids.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(shuffle.next_below(i));
    std::swap(epoch.image_ids[i - 1], epoch.image_ids[j]);
  }
  return epoch;
}

struct CategoryExposure {
  Id category_id = 0;
  std::int64_t image_count = 0;  // exposure with all factors at 1
  double expected = 0.0;         // sum of r_i over images containing the category
};

// Expected images-seen-per-epoch for every category: the epoch-level
// balancing effect of a sampler configuration.
inline std::vector<CategoryExposure> expected_exposure(const Dataset& ds,
                                                       const ImageRepeatTable& irt,
                                                       const FrequencyTable& ft) {
  if (irt.source_digest != ds.source_digest() || ft.source_digest != ds.source_digest()) {
    throw Error(ErrorCode::ProvenanceMismatch,
                "inputs derive from different annotation files");
  }
  if (irt.images.size() != ds.images().size()) {
    throw Error(ErrorCode::ProvenanceMismatch, "image repeat table size mismatch");
  }

  std::vector<CategoryExposure> out(ft.categories.size());
  for (std::size_t i = 0; i < ft.categories.size(); ++i) {
    out[i].category_id = ft.categories[i].category_id;
    out[i].image_count = ft.categories[i].image_count;
  }
  for (std::size_t i = 0; i < irt.images.size(); ++i) {
    const auto& img = ds.images()[i];
    for (Id cat : img.category_ids) {
      out[ds.category_position(cat)].expected += irt.images[i].r;
    }
  }
  return out;
}

// Newline-delimited image ids, for direct dataloader consumption.
inline void write_epoch_ids(const EpochSample& epoch, std::ostream& os) {
  std::string buf;
  buf.reserve(1 << 20);
  for (Id id : epoch.image_ids) {
    buf += detail::format_int(id);
    buf += '\n';
    if (buf.size() > (1 << 20) - 32) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_epoch_json(const EpochSample& epoch, std::ostream& os) {
  std::string buf = detail::provenance_json_prefix(epoch.config, epoch.source_digest);
  buf += ",\"seed\":";
  buf += detail::format_uint(epoch.seed);
  buf += ",\"epoch_index\":";
  buf += detail::format_int(epoch.epoch_index);
  buf += ",\"epoch_length\":";
  buf += detail::format_int(static_cast<std::int64_t>(epoch.image_ids.size()));
  buf += ",\"image_ids\":[";
  buf.reserve(1 << 20);
  bool first = true;
  for (Id id : epoch.image_ids) {
    if (!first) buf += ',';
    first = false;
    buf += detail::format_int(id);
    if (buf.size() > (1 << 20) - 32) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  buf += "]}\n";
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace irfs
