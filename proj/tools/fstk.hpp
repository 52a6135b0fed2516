#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pgmrf/core.hpp"

namespace pgmrf::io {

/// FSTK v1 text format:
///   line 1: "FSTK 1"
///   line 2: "rows cols frames dtype", dtype in {f64, u32, u1}
///   then, frame after frame, `rows` lines of `cols` values separated by
///   single spaces. f64 uses 17 significant digits so values round-trip
///   exactly. LF endings, no trailing whitespace.
enum class Dtype { F64, U32, U1 };

std::string to_string(Dtype d);

struct FstkHeader {
  Geometry geometry;
  Dtype dtype = Dtype::F64;
};

std::string format_fstk(const IntensityStack& x);
/// dtype must be U32 or U1; U1 rejects entries > 1.
std::string format_fstk(const CountStack& y, Dtype dtype);
std::string format_fstk(const Mask& mask);

FstkHeader parse_header(const std::string& text);
/// Any dtype; integer data converts exactly.
IntensityStack parse_intensity(const std::string& text);
/// u32 or u1 only.
CountStack parse_counts(const std::string& text);
/// u1 only.
Mask parse_mask(const std::string& text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

IntensityStack read_intensity(const std::filesystem::path& path);
CountStack read_counts(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);
/// A single-frame f64 stack with strictly positive entries.
EfficiencyMap read_efficiency(const std::filesystem::path& path);

/// 64-bit FNV-1a digest, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pgmrf::io
