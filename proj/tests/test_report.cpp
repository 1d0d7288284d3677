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

#include <cmath>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "irfs/report.hpp"
#include "irfs/synth.hpp"
#include "support/fixtures.hpp"

using irfs::BalanceReport;
using irfs::Dataset;
using irfs::MeanKind;
using irfs::Method;
using irfs::SamplerConfig;
using irfs::SynthSpec;
using irfs::testing::TempDir;

namespace {

// Equal image counts, 10x instance gap: the discrimination scenario.
Dataset gap_fixture() {
  SynthSpec spec;
  spec.num_categories = 2;
  spec.num_images = 10;
  spec.image_count_law = SynthSpec::ImageCountLaw::explicit_counts({5, 5});
  spec.instance_law = SynthSpec::InstanceLaw::explicit_per_category({1, 10});
  spec.seed = 21;
  return irfs::generate(spec);
}

}  // namespace

TEST_CASE("RFS ties the gap fixture, IRFS separates it", "[report]") {
  const Dataset ds = gap_fixture();
  const BalanceReport report = irfs::build_report(
      ds, {{Method::rfs(), 0.8}, {Method::irfs(MeanKind::Geometric), 0.8}});

  const auto& rfs_rows = report.methods[0].categories;
  REQUIRE(*rfs_rows[0].r == *rfs_rows[1].r);

  const auto& irfs_rows = report.methods[1].categories;
  // Category 1 is the instance-scarce one.
  REQUIRE(*irfs_rows[0].r > *irfs_rows[1].r);
}

TEST_CASE("t = 0 leaves exposure untouched", "[report]") {
  const Dataset ds = gap_fixture();
  const BalanceReport report = irfs::build_report(ds, {{Method::rfs(), 0.0}});
  for (const auto& row : report.methods[0].categories) {
    REQUIRE(*row.r == 1.0);
    REQUIRE(row.exposure_after == static_cast<double>(row.exposure_before));
  }
  for (const auto& bucket : report.methods[0].buckets) {
    REQUIRE(bucket.exposure_after == bucket.exposure_before);
  }
}

TEST_CASE("rare-bucket factors under IRFS dominate RFS on a zipf tail", "[report][property]") {
  SynthSpec spec;
  spec.num_categories = 120;
  spec.num_images = 600;
  spec.image_count_law = SynthSpec::ImageCountLaw::zipf(1.0);
  spec.instance_law = SynthSpec::InstanceLaw::geometric(0.3);
  spec.seed = 5;
  const Dataset ds = irfs::generate(spec);

  const BalanceReport report = irfs::build_report(
      ds, {{Method::rfs(), irfs::kDefaultThreshold},
           {Method::irfs(MeanKind::Geometric), irfs::kDefaultThreshold}});

  // Rare categories here hold at least one instance per occupied image, so
  // f_instance <= f_image for most; check the bucket means line up.
  const auto& rfs_rare = report.methods[0].buckets[0];
  const auto& irfs_rare = report.methods[1].buckets[0];
  REQUIRE(rfs_rare.bucket == irfs::FrequencyBucket::Rare);
  REQUIRE(rfs_rare.categories > 0);

  bool all_scarcer = true;
  for (std::size_t i = 0; i < report.frequencies.categories.size(); ++i) {
    const auto& freq = report.frequencies.categories[i];
    if (freq.image_count == 0) continue;
    if (irfs::bucket_of(freq) == irfs::FrequencyBucket::Rare &&
        freq.f_instance > freq.f_image) {
      all_scarcer = false;
    }
  }
  if (all_scarcer && irfs_rare.mean_r && rfs_rare.mean_r) {
    REQUIRE(*irfs_rare.mean_r >= *rfs_rare.mean_r);
  }

  // Per-category the dominance is unconditional where instances are scarcer.
  for (std::size_t i = 0; i < report.frequencies.categories.size(); ++i) {
    const auto& freq = report.frequencies.categories[i];
    if (freq.image_count == 0 || freq.f_instance > freq.f_image) continue;
    REQUIRE(*report.methods[1].categories[i].r >= *report.methods[0].categories[i].r);
  }
}

TEST_CASE("bucket aggregates recompute from module outputs", "[report]") {
  const Dataset ds = gap_fixture();
  const SamplerConfig cfg{Method::irfs(MeanKind::Geometric), 0.8};
  const BalanceReport report = irfs::build_report(ds, {cfg});

  // Independent recomputation of the rare-bucket mean factor.
  const auto freq = irfs::compute_frequencies(ds);
  const auto rft = irfs::compute_repeat_factors(freq, cfg);
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < freq.categories.size(); ++i) {
    if (irfs::bucket_of(freq.categories[i]) != irfs::FrequencyBucket::Rare) continue;
    if (rft.categories[i].r) {
      sum += *rft.categories[i].r;
      ++n;
    }
  }
  const auto& rare = report.methods[0].buckets[0];
  REQUIRE(rare.categories == n);
  REQUIRE_THAT(*rare.mean_r, Catch::Matchers::WithinRel(sum / n, 1e-12));

  std::int64_t bucket_total = 0;
  for (const auto& bucket : report.methods[0].buckets) bucket_total += bucket.categories;
  REQUIRE(bucket_total == report.total_categories);
}

TEST_CASE("diff is antisymmetric and zero on the diagonal", "[report]") {
  const Dataset ds = gap_fixture();
  const BalanceReport report = irfs::build_report(
      ds, {{Method::rfs(), 0.8}, {Method::irfs(MeanKind::Geometric), 0.8}});

  const auto self = irfs::diff_methods(report, 0, 0);
  for (const auto& row : self.rows) {
    REQUIRE(*row.delta_r == 0.0);
    REQUIRE(row.delta_exposure == 0.0);
  }

  const auto ab = irfs::diff_methods(report, 0, 1);
  const auto ba = irfs::diff_methods(report, 1, 0);
  for (std::size_t i = 0; i < ab.rows.size(); ++i) {
    REQUIRE(*ab.rows[i].delta_r == -*ba.rows[i].delta_r);
    REQUIRE(ab.rows[i].delta_exposure == -ba.rows[i].delta_exposure);
  }

  REQUIRE_THROWS_AS(irfs::diff_methods(report, 0, 2), irfs::Error);
}

TEST_CASE("fixture delta between RFS and IRFS", "[report]") {
  TempDir tmp;
  const Dataset ds =
      irfs::load_dataset(tmp.write_file("mini.json", irfs::testing::kMiniFixtureJson));
  const BalanceReport report = irfs::build_report(
      ds, {{Method::rfs(), 0.5}, {Method::irfs(MeanKind::Geometric), 0.5}});
  const auto delta = irfs::diff_methods(report, 0, 1);
  // Category 2: sqrt(2) - sqrt(3) < 0.
  REQUIRE_THAT(*delta.rows[1].delta_r,
               Catch::Matchers::WithinRel(std::sqrt(2.0) - std::sqrt(3.0), 1e-12));
}

TEST_CASE("report serialization is byte-reproducible", "[report]") {
  const Dataset ds = gap_fixture();
  const std::vector<SamplerConfig> configs = {{Method::rfs(), irfs::kDefaultThreshold},
                                              {Method::irfs(MeanKind::Harmonic), 0.01}};
  const BalanceReport a = irfs::build_report(ds, configs);
  const BalanceReport b = irfs::build_report(ds, configs);

  REQUIRE(irfs::report_to_json(a).dump(2) == irfs::report_to_json(b).dump(2));

  std::ostringstream csv_a, csv_b, table_a, table_b;
  irfs::write_report_csv(a, csv_a);
  irfs::write_report_csv(b, csv_b);
  REQUIRE(csv_a.str() == csv_b.str());
  irfs::write_report_table(a, table_a);
  irfs::write_report_table(b, table_b);
  REQUIRE(table_a.str() == table_b.str());
}

TEST_CASE("report JSON carries schema version and configs", "[report]") {
  const Dataset ds = gap_fixture();
  const auto doc = irfs::report_to_json(
      irfs::build_report(ds, {{Method::instance_only(), 0.25}}));
  REQUIRE(doc["schema_version"] == 1);
  REQUIRE(doc["methods"][0]["config"]["method"] == "instance-only");
  REQUIRE(doc["methods"][0]["config"]["threshold_t"] == 0.25);
  REQUIRE(doc["methods"][0]["buckets"].size() == 4);
}

TEST_CASE("empty configuration list is rejected", "[report]") {
  const Dataset ds = gap_fixture();
  REQUIRE_THROWS_AS(irfs::build_report(ds, {}), irfs::Error);
}
