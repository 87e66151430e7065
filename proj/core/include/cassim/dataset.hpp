#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cassim/evalkit.hpp"

namespace cassim::data {

// Directory layout: <root>/<class>/<program file>. Program ids are
// "<class>/<filename>"; the class label is the subdirectory name.
struct LoadStats {
  int parsed = 0;
  int skipped = 0;
  std::vector<std::pair<std::string, std::string>> skipped_files;  // (id, reason)
  std::vector<std::string> empty_classes;
};

// Unparsable programs are skipped and counted, never fatal.
evalkit::SourceCorpus load_dataset(const std::filesystem::path& root, LoadStats* stats = nullptr);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cassim::data
