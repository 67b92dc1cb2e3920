#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "lrt/corpus.hpp"

namespace test {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(LRT_SOURCE_DIR) / rel;
}

inline lrt::Corpus fixture_corpus() { return lrt::load_corpus(source_path("fixtures/corpus.json")); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lrt-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const { return (path_ / rel).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace test
