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

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace irfs::testing {

// Hand-authored 4 images / 9 annotations / 2 categories fixture.
// Category 1 ("abundant") occurs in all 4 images with 8 instances total;
// category 2 ("scarce") occurs once, in image 1, which therefore holds both.
// Extra COCO keys (file_name, bbox, area, iscrowd, info, licenses) exercise
// the parser's skip paths.
inline const char* kMiniFixtureJson = R"({
  "info": {"description": "mini fixture", "version": "1.0", "year": 2024},
  "licenses": [{"id": 1, "name": "none", "url": ""}],
  "images": [
    {"id": 1, "file_name": "000001.jpg", "width": 640, "height": 480},
    {"id": 2, "file_name": "000002.jpg", "width": 640, "height": 480},
    {"id": 3, "file_name": "000003.jpg", "width": 640, "height": 480},
    {"id": 4, "file_name": "000004.jpg", "width": 640, "height": 480}
  ],
  "annotations": [
    {"id": 1, "image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 2, "image_id": 1, "category_id": 1, "bbox": [5, 5, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 3, "image_id": 2, "category_id": 1, "bbox": [0, 0, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 4, "image_id": 2, "category_id": 1, "bbox": [5, 5, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 5, "image_id": 3, "category_id": 1, "bbox": [0, 0, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 6, "image_id": 3, "category_id": 1, "bbox": [5, 5, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 7, "image_id": 4, "category_id": 1, "bbox": [0, 0, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 8, "image_id": 4, "category_id": 1, "bbox": [5, 5, 10, 10], "area": 100.0, "iscrowd": 0},
    {"id": 9, "image_id": 1, "category_id": 2, "bbox": [20, 20, 4, 4], "area": 16.0, "iscrowd": 0}
  ],
  "categories": [
    {"id": 1, "name": "abundant", "supercategory": "stuff"},
    {"id": 2, "name": "scarce", "supercategory": "stuff"}
  ]
})";

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("irfs_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write_file(const std::string& name, const std::string& contents) const {
    const auto file = path_ / name;
    std::ofstream out(file, std::ios::binary);
    out << contents;
    return file;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace irfs::testing
