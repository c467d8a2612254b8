#include "test_support.hpp"

#include <cstdlib>
#include <stdexcept>

namespace iclef::test {

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ICLEF_FIXTURE_DIR) / name; }

TempDir::TempDir() {
  auto pattern = (std::filesystem::temp_directory_path() / "iclef-test-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace iclef::test
