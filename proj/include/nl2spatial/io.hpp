#pragma once

// File output that never leaves a partially written target behind: data goes
// to a sibling temporary file which is renamed over the target on commit().

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace nl2spatial {

class AtomicFile {
public:
  explicit AtomicFile(std::filesystem::path target);  // throws IoError
  ~AtomicFile();                                      // discards uncommitted data
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();  // flush, close and rename; throws IoError

private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& target, std::string_view content);

// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace nl2spatial
