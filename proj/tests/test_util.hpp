#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#ifndef CHATSENT_DATA_DIR
#define CHATSENT_DATA_DIR "data"
#endif

namespace testutil {

inline std::string data_path(const std::string& rel) {
  return std::string(CHATSENT_DATA_DIR) + "/" + rel;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("chatsent_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace testutil
