#include "fstk.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pgmrf/errors.hpp"

namespace pgmrf::io {

namespace {

Dtype parse_dtype(const std::string& s) {
  if (s == "f64") return Dtype::F64;
  if (s == "u32") return Dtype::U32;
  if (s == "u1") return Dtype::U1;
  throw ValidationError("FSTK: unknown dtype '" + s + "'");
}

std::string render(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

template <class T, class Render>
std::string format_body(const FrameStack<T>& s, Dtype dtype, Render render_value) {
  const Geometry& g = s.geometry();
  std::string out = "FSTK 1\n" + std::to_string(g.rows) + " " + std::to_string(g.cols) + " " +
                    std::to_string(g.frames) + " " + to_string(dtype) + "\n";
  for (std::size_t t = 0; t < g.frames; ++t) {
    for (std::size_t i = 0; i < g.rows; ++i) {
      for (std::size_t j = 0; j < g.cols; ++j) {
        if (j > 0) out += ' ';
        out += render_value(s(i, j, t));
      }
      out += '\n';
    }
  }
  return out;
}

// Splits the text into lines and checks the header; returns the body lines.
struct Parsed {
  FstkHeader header;
  std::vector<std::string_view> lines;
};

Parsed split(const std::string& text) {
  Parsed p;
  std::size_t pos = 0;
  std::vector<std::string_view> lines;
  const std::string_view view(text);
  while (pos < view.size()) {
    const std::size_t nl = view.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? view.size() : nl;
    std::string_view line = view.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  if (lines.size() < 2 || lines[0] != "FSTK 1") throw ValidationError("FSTK: missing 'FSTK 1' magic line");
  std::istringstream hdr{std::string(lines[1])};
  std::string dtype;
  std::size_t rows = 0, cols = 0, frames = 0;
  if (!(hdr >> rows >> cols >> frames >> dtype) || rows == 0 || cols == 0 || frames == 0) {
    throw ValidationError("FSTK: malformed dimension line");
  }
  p.header = {{rows, cols, frames}, parse_dtype(dtype)};
  lines.erase(lines.begin(), lines.begin() + 2);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != rows * frames) {
    throw ValidationError("FSTK: expected " + std::to_string(rows * frames) + " data lines, found " +
                          std::to_string(lines.size()));
  }
  p.lines = std::move(lines);
  return p;
}

template <class T>
T parse_value(std::string_view tok, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ValidationError("FSTK: bad value '" + std::string(tok) + "' on data line " +
                          std::to_string(line_no + 1));
  }
  return v;
}

template <class T>
std::vector<T> parse_values(const Parsed& p) {
  const Geometry& g = p.header.geometry;
  std::vector<T> data;
  data.reserve(g.size());
  for (std::size_t l = 0; l < p.lines.size(); ++l) {
    std::string_view line = p.lines[l];
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      const std::size_t end = std::min(line.find(' ', pos), line.size());
      data.push_back(parse_value<T>(line.substr(pos, end - pos), l));
      ++count;
      pos = end;
    }
    if (count != g.cols) {
      throw ValidationError("FSTK: data line " + std::to_string(l + 1) + " has " +
                            std::to_string(count) + " values, expected " + std::to_string(g.cols));
    }
  }
  return data;
}

}  // namespace

std::string to_string(Dtype d) {
  switch (d) {
    case Dtype::F64: return "f64";
    case Dtype::U32: return "u32";
    case Dtype::U1: return "u1";
  }
  return "f64";
}

std::string format_fstk(const IntensityStack& x) {
  return format_body(x, Dtype::F64, [](double v) { return render(v); });
}

std::string format_fstk(const CountStack& y, Dtype dtype) {
  if (dtype == Dtype::F64) throw std::invalid_argument("count stacks are written as u32 or u1");
  if (dtype == Dtype::U1) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (y.data()[k] > 1) {
        throw ValidationError("u1 output requires binary data; site " +
                              pgmrf::to_string(y.geometry().index(k)) + " holds " +
                              std::to_string(y.data()[k]));
      }
    }
  }
  return format_body(y, dtype, [](std::uint32_t v) { return std::to_string(v); });
}

std::string format_fstk(const Mask& mask) {
  return format_body(mask.bits(), Dtype::U1, [](std::uint8_t v) { return std::to_string(v); });
}

FstkHeader parse_header(const std::string& text) { return split(text).header; }

IntensityStack parse_intensity(const std::string& text) {
  const Parsed p = split(text);
  if (p.header.dtype == Dtype::F64) {
    std::vector<double> values = parse_values<double>(p);
    for (double v : values) {
      if (!std::isfinite(v)) throw ValidationError("FSTK: non-finite intensity value");
    }
    return IntensityStack(p.header.geometry, std::move(values));
  }
  const auto counts = parse_values<std::uint32_t>(p);
  return IntensityStack(p.header.geometry, std::vector<double>(counts.begin(), counts.end()));
}

CountStack parse_counts(const std::string& text) {
  const Parsed p = split(text);
  if (p.header.dtype == Dtype::F64) throw ValidationError("FSTK: observations must be u32 or u1");
  CountStack y(p.header.geometry, parse_values<std::uint32_t>(p));
  if (p.header.dtype == Dtype::U1) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (y.data()[k] > 1) {
        throw ValidationError("FSTK: u1 file holds non-binary value at " +
                              pgmrf::to_string(y.geometry().index(k)));
      }
    }
  }
  return y;
}

Mask parse_mask(const std::string& text) {
  const Parsed p = split(text);
  if (p.header.dtype != Dtype::U1) throw ValidationError("FSTK: masks must be u1");
  const auto values = parse_values<std::uint32_t>(p);
  std::vector<std::uint8_t> bits(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > 1) throw ValidationError("FSTK: mask holds a value other than 0/1");
    bits[k] = static_cast<std::uint8_t>(values[k]);
  }
  return Mask(FrameStack<std::uint8_t>(p.header.geometry, std::move(bits)));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw ValidationError("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

IntensityStack read_intensity(const std::filesystem::path& path) {
  return parse_intensity(read_file(path));
}

CountStack read_counts(const std::filesystem::path& path) { return parse_counts(read_file(path)); }

Mask read_mask(const std::filesystem::path& path) { return parse_mask(read_file(path)); }

EfficiencyMap read_efficiency(const std::filesystem::path& path) {
  const IntensityStack s = read_intensity(path);
  if (s.frames() != 1) throw ValidationError("efficiency map must have exactly one frame");
  return EfficiencyMap(s.rows(), s.cols(), s.data());
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pgmrf::io
