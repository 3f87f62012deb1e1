// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_TEST_SUPPORT_HPP
#define EMLOC_TEST_SUPPORT_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

namespace emloc::test
{

// Scratch directory removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string &tag)
  {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("emloc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path &p, const std::string &s)
{
  std::ofstream(p, std::ios::binary) << s;
}

} // namespace emloc::test

#endif // EMLOC_TEST_SUPPORT_HPP
