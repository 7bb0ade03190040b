#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "depthedge/core/grid.hpp"

namespace depthedge::imageio {

// Supported on-disk formats:
//
//   PFM  "Pf" (1 channel) or "PF" (3 channels), "<w> <h>", "<scale>", then
//        32-bit floats. Negative scale: little-endian, rows bottom-to-top.
//        Positive scale: big-endian, rows top-to-bottom.
//   PGM  binary "P5", maxval 65535, 16-bit big-endian samples in millimetres.
//   PBM  binary "P4", MSB-first bit rows padded to a whole byte.
//
// Depth: values in metres; zero, negative and non-finite samples are invalid.
// Probabilities: non-finite samples are invalid. Normals: a zero or
// non-finite vector is invalid. Invalid pixels are written as zeros.

enum class DepthFormat { kPfm, kPgm16 };

using Bytes = std::vector<std::uint8_t>;

/// Single- or three-channel float image, rows stored top to bottom.
struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;
};

PfmImage decode_pfm(std::span<const std::uint8_t> bytes);
Bytes encode_pfm(const PfmImage& img, bool little_endian = true);

DepthGrid decode_depth_pgm(std::span<const std::uint8_t> bytes);
Bytes encode_depth_pgm(const DepthGrid& d);

EdgeMap decode_pbm(std::span<const std::uint8_t> bytes);
Bytes encode_pbm(const EdgeMap& m);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Format inferred from the extension (.pfm or .pgm).
DepthFormat depth_format_for(const std::filesystem::path& path);

DepthGrid read_depth(const std::filesystem::path& path, DepthFormat format);
DepthGrid read_depth(const std::filesystem::path& path);
void write_depth(const DepthGrid& d, const std::filesystem::path& path, DepthFormat format);
void write_depth(const DepthGrid& d, const std::filesystem::path& path);

ProbGrid read_prob(const std::filesystem::path& path);
void write_prob(const ProbGrid& p, const std::filesystem::path& path);

NormalGrid read_normals(const std::filesystem::path& path);
void write_normals(const NormalGrid& n, const std::filesystem::path& path);

/// Edge annotation or validity mask (bit 1 = edge / valid).
EdgeMap read_mask(const std::filesystem::path& path);
void write_mask(const EdgeMap& m, const std::filesystem::path& path);

}  // namespace depthedge::imageio
