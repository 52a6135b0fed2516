#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace pgmrf::io {

/// Flat key=value run record. Keys keep insertion order; `arg.N` entries hold
/// the exact command line so a run can be replayed.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string format() const;
  static RunManifest parse(const std::string& text);

  /// The recorded command line (arg.0, arg.1, ...).
  std::vector<std::string> arguments() const;
  void set_arguments(const std::vector<std::string>& args);

  void record_input(const std::string& name, const std::filesystem::path& path);
  void record_output(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::size_t outputs_ = 0;
};

}  // namespace pgmrf::io
