#include <algorithm>
#include <fstream>
#include <sstream>

#include "cassim/dataset.hpp"

namespace cassim::data {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing file: " + path.string());
}

evalkit::SourceCorpus load_dataset(const fs::path& root, LoadStats* stats) {
  if (!fs::is_directory(root)) throw Error("dataset root is not a directory: " + root.string());

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw Error("dataset has no class directories: " + root.string());

  std::vector<evalkit::SourceProgram> programs;
  for (const fs::path& dir : class_dirs) {
    std::string label = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty() && stats) stats->empty_classes.push_back(label);
    for (const fs::path& file : files) {
      std::string id = label + "/" + file.filename().string();
      cst::SourceFile source{id, read_file(file), cst::Dialect::c_subset};
      cst::ParseResult parsed = cst::parse_source(source);
      if (auto* tree = std::get_if<cst::CstNode>(&parsed)) {
        programs.push_back(evalkit::SourceProgram{id, label, std::move(*tree)});
        if (stats) ++stats->parsed;
      } else if (stats) {
        const auto& diags = std::get<cst::ParseDiagnostics>(parsed);
        std::string reason = diags.errors.empty() ? "parse error" : diags.errors.front().message;
        ++stats->skipped;
        stats->skipped_files.emplace_back(id, reason);
      }
    }
  }
  if (programs.empty()) throw Error("dataset has no parsable programs: " + root.string());
  return evalkit::SourceCorpus::from_programs(std::move(programs));
}

}  // namespace cassim::data
