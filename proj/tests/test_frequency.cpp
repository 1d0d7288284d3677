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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "irfs/frequency.hpp"
#include "irfs/synth.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using irfs::Dataset;
using irfs::FrequencyBucket;
using irfs::FrequencyTable;
using irfs::testing::kMiniFixtureJson;
using irfs::testing::TempDir;

namespace {

Dataset mini_fixture(const TempDir& tmp) {
  return irfs::load_dataset(tmp.write_file("mini.json", kMiniFixtureJson));
}

}  // namespace

TEST_CASE("fixture frequencies match the hand count", "[frequency]") {
  TempDir tmp;
  const FrequencyTable table = irfs::compute_frequencies(mini_fixture(tmp));

  REQUIRE(table.total_images == 4);
  REQUIRE(table.total_instances == 9);
  REQUIRE(table.categories.size() == 2);

  const auto& abundant = table.categories[0];
  REQUIRE(abundant.category_id == 1);
  REQUIRE(abundant.image_count == 4);
  REQUIRE(abundant.instance_count == 8);
  REQUIRE(abundant.f_image == 1.0);
  REQUIRE_THAT(abundant.f_instance, Catch::Matchers::WithinRel(8.0 / 9.0, 1e-15));

  const auto& scarce = table.categories[1];
  REQUIRE(scarce.category_id == 2);
  REQUIRE(scarce.image_count == 1);
  REQUIRE(scarce.instance_count == 1);
  REQUIRE(scarce.f_image == 0.25);
  REQUIRE_THAT(scarce.f_instance, Catch::Matchers::WithinRel(1.0 / 9.0, 1e-15));
}

TEST_CASE("single image, single instance, single category", "[frequency]") {
  TempDir tmp;
  const auto path = tmp.write_file("one.json", R"({
    "images": [{"id": 1}],
    "annotations": [{"id": 1, "image_id": 1, "category_id": 1}],
    "categories": [{"id": 1, "name": "only"}]
  })");
  const FrequencyTable table = irfs::compute_frequencies(irfs::load_dataset(path));
  REQUIRE(table.categories[0].f_image == 1.0);
  REQUIRE(table.categories[0].f_instance == 1.0);
}

TEST_CASE("registered category without annotations has zero counts", "[frequency]") {
  TempDir tmp;
  const auto path = tmp.write_file("ghost.json", R"({
    "images": [{"id": 1}],
    "annotations": [{"id": 1, "image_id": 1, "category_id": 1}],
    "categories": [{"id": 1, "name": "real"}, {"id": 2, "name": "ghost"}]
  })");
  const FrequencyTable table = irfs::compute_frequencies(irfs::load_dataset(path));
  const auto& ghost = table.categories[1];
  REQUIRE(ghost.image_count == 0);
  REQUIRE(ghost.instance_count == 0);
  REQUIRE(ghost.f_image == 0.0);
  REQUIRE(ghost.f_instance == 0.0);
  REQUIRE(irfs::bucket_of(ghost) == FrequencyBucket::Empty);
}

TEST_CASE("empty dataset is rejected", "[frequency]") {
  TempDir tmp;
  const auto path =
      tmp.write_file("empty.json", R"({"images": [], "annotations": [], "categories": []})");
  REQUIRE_THROWS_AS(irfs::compute_frequencies(irfs::load_dataset(path)), irfs::Error);

  // Images but no annotations is equally unusable.
  const auto path2 = tmp.write_file("noann.json",
                                    R"({"images": [{"id": 1}], "annotations": [],
                                        "categories": [{"id": 1, "name": "a"}]})");
  REQUIRE_THROWS_AS(irfs::compute_frequencies(irfs::load_dataset(path2)), irfs::Error);
}

TEST_CASE("bucket boundaries", "[frequency]") {
  auto freq_with_count = [](std::int64_t images) {
    irfs::CategoryFrequency f;
    f.image_count = images;
    f.instance_count = images;
    return f;
  };
  REQUIRE(irfs::bucket_of(freq_with_count(0)) == FrequencyBucket::Empty);
  REQUIRE(irfs::bucket_of(freq_with_count(1)) == FrequencyBucket::Rare);
  REQUIRE(irfs::bucket_of(freq_with_count(9)) == FrequencyBucket::Rare);
  REQUIRE(irfs::bucket_of(freq_with_count(10)) == FrequencyBucket::Rare);
  REQUIRE(irfs::bucket_of(freq_with_count(11)) == FrequencyBucket::Common);
  REQUIRE(irfs::bucket_of(freq_with_count(100)) == FrequencyBucket::Common);
  REQUIRE(irfs::bucket_of(freq_with_count(101)) == FrequencyBucket::Frequent);
}

TEST_CASE("frequencies equal a naive recount on random datasets", "[frequency][property]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    irfs::SynthSpec spec;
    spec.num_categories = 1 + static_cast<std::int64_t>(seed % 7);
    spec.num_images = 5 + static_cast<std::int64_t>(seed * 3 % 40);
    spec.image_count_law = irfs::SynthSpec::ImageCountLaw::zipf(0.5 + 0.1 * (seed % 10));
    spec.instance_law = irfs::SynthSpec::InstanceLaw::geometric(0.4);
    spec.seed = seed;
    const Dataset ds = irfs::generate(spec);
    const FrequencyTable table = irfs::compute_frequencies(ds);
    const auto oracle = irfs::testing::naive_recount(ds);

    for (const auto& row : table.categories) {
      const auto& expected = oracle.at(row.category_id);
      REQUIRE(row.image_count == expected.image_count);
      REQUIRE(row.instance_count == expected.instance_count);
      REQUIRE_THAT(row.f_image,
                   Catch::Matchers::WithinRel(
                       static_cast<double>(expected.image_count) / table.total_images, 1e-15));
      REQUIRE_THAT(row.f_instance,
                   Catch::Matchers::WithinRel(static_cast<double>(expected.instance_count) /
                                                  table.total_instances,
                                              1e-15));
    }
  }
}

TEST_CASE("annotation order does not affect the table", "[frequency][property]") {
  TempDir tmp;
  auto doc = nlohmann::json::parse(kMiniFixtureJson);
  std::reverse(doc["annotations"].begin(), doc["annotations"].end());
  const auto shuffled = tmp.write_file("shuffled.json", doc.dump());

  const FrequencyTable a = irfs::compute_frequencies(mini_fixture(tmp));
  const FrequencyTable b = irfs::compute_frequencies(irfs::load_dataset(shuffled));

  REQUIRE(a.categories.size() == b.categories.size());
  for (std::size_t i = 0; i < a.categories.size(); ++i) {
    REQUIRE(a.categories[i].category_id == b.categories[i].category_id);
    REQUIRE(a.categories[i].image_count == b.categories[i].image_count);
    REQUIRE(a.categories[i].instance_count == b.categories[i].instance_count);
    REQUIRE(a.categories[i].f_image == b.categories[i].f_image);
    REQUIRE(a.categories[i].f_instance == b.categories[i].f_instance);
  }
}

TEST_CASE("equal image counts with diverging instance counts are preserved", "[frequency]") {
  // Both categories occupy 5 images; instances differ 10x.
  irfs::SynthSpec spec;
  spec.num_categories = 2;
  spec.num_images = 10;
  spec.image_count_law = irfs::SynthSpec::ImageCountLaw::explicit_counts({5, 5});
  spec.instance_law = irfs::SynthSpec::InstanceLaw::explicit_per_category({1, 10});
  spec.seed = 3;
  const FrequencyTable table = irfs::compute_frequencies(irfs::generate(spec));

  REQUIRE(table.categories[0].image_count == table.categories[1].image_count);
  REQUIRE(table.categories[0].instance_count == 5);
  REQUIRE(table.categories[1].instance_count == 50);
}

TEST_CASE("frequency CSV has the documented columns", "[frequency]") {
  TempDir tmp;
  const FrequencyTable table = irfs::compute_frequencies(mini_fixture(tmp));
  std::ostringstream csv;
  irfs::write_frequency_csv(table, csv);
  REQUIRE_THAT(csv.str(), Catch::Matchers::ContainsSubstring(
                              "category_id,name,image_count,instance_count,f_image,f_instance,"
                              "bucket"));
  REQUIRE_THAT(csv.str(), Catch::Matchers::ContainsSubstring("1,abundant,4,8,1,"));
  REQUIRE_THAT(csv.str(), Catch::Matchers::ContainsSubstring("2,scarce,1,1,0.25,"));
}

TEST_CASE("frequency JSON embeds provenance", "[frequency]") {
  TempDir tmp;
  const Dataset ds = mini_fixture(tmp);
  const auto doc = irfs::frequency_to_json(irfs::compute_frequencies(ds));
  REQUIRE(doc["schema_version"] == 1);
  REQUIRE(doc["source_digest"] == ds.source_digest_hex());
  REQUIRE(doc["categories"].size() == 2);
  REQUIRE(doc["categories"][1]["bucket"] == "rare");
}
