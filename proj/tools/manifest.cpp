#include "manifest.hpp"

#include <algorithm>
#include <stdexcept>

#include "fstk.hpp"
#include "pgmrf/errors.hpp"

namespace pgmrf::io {

void RunManifest::set(const std::string& key, const std::string& value) {
  if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw std::invalid_argument("manifest keys may not contain '=' and entries may not span lines");
  }
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it != entries_.end()) {
    it->second = value;
  } else {
    entries_.emplace_back(key, value);
  }
}

const std::string* RunManifest::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string RunManifest::format() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

RunManifest RunManifest::parse(const std::string& text) {
  RunManifest m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("manifest line without '=': " + line);
    m.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

std::vector<std::string> RunManifest::arguments() const {
  std::vector<std::string> args;
  for (std::size_t i = 0;; ++i) {
    const std::string* v = find("arg." + std::to_string(i));
    if (v == nullptr) break;
    args.push_back(*v);
  }
  return args;
}

void RunManifest::set_arguments(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) set("arg." + std::to_string(i), args[i]);
}

void RunManifest::record_input(const std::string& name, const std::filesystem::path& path) {
  set("input." + name + ".path", path.string());
  set("input." + name + ".fnv1a64", fnv1a64_hex(read_file(path)));
}

void RunManifest::record_output(const std::filesystem::path& path) {
  set("output." + std::to_string(outputs_++), path.string());
}

}  // namespace pgmrf::io
