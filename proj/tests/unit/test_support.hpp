#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "cscope/error.hpp"

namespace cscope::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cscope-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(CSCOPE_FIXTURE_DIR) / rel;
}

}  // namespace cscope::testing

// Expects `stmt` to throw cscope::Error carrying `code`.
#define EXPECT_CSCOPE_ERROR(stmt, expected)                                  \
  do {                                                                       \
    try {                                                                    \
      stmt;                                                                  \
      ADD_FAILURE() << "expected " << ::cscope::error_name(expected);        \
    } catch (const ::cscope::Error& e_) {                                    \
      EXPECT_EQ(e_.name(), ::cscope::error_name(expected)) << e_.what();     \
    }                                                                        \
  } while (0)
