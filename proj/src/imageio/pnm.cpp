#include "depthedge/imageio/pnm.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace depthedge::imageio {
namespace {

bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

// Tokenizer for the ASCII part of a netpbm-style header.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string magic() {
    if (bytes_.size() < 2) throw ParseError("file too short for a magic number", 0);
    pos_ = 2;
    return std::string(bytes_.begin(), bytes_.begin() + 2);
  }

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
    if (pos_ == start) throw ParseError("unexpected end of header", pos_);
    return std::string(bytes_.begin() + start, bytes_.begin() + pos_);
  }

  long integer(const char* what) {
    skip_space_and_comments();
    const std::size_t at = pos_;
    const std::string t = token();
    long v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size())
      throw ParseError(std::string("malformed ") + what + " '" + t + "'", at);
    return v;
  }

  double real(const char* what) {
    skip_space_and_comments();
    const std::size_t at = pos_;
    const std::string t = token();
    std::istringstream is(t);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || is.peek() != std::char_traits<char>::eof())
      throw ParseError(std::string("malformed ") + what + " '" + t + "'", at);
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_start() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw ParseError("missing whitespace before payload", pos_);
    return pos_ + 1;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_dims(long w, long h, std::size_t at) {
  if (w <= 0 || h <= 0) throw ParseError("nonpositive image dimensions", at);
  if (w > (1L << 20) || h > (1L << 20)) throw ParseError("image dimensions too large", at);
}

void check_payload(std::span<const std::uint8_t> bytes, std::size_t start, std::size_t need) {
  if (bytes.size() < start || bytes.size() - start < need)
    throw ParseError("truncated payload: need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() > start ? bytes.size() - start : 0),
                     bytes.size());
}

float load_float(const std::uint8_t* p, bool little) {
  std::uint32_t u = little ? (std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                              std::uint32_t(p[3]) << 24)
                           : (std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 | std::uint32_t(p[1]) << 16 |
                              std::uint32_t(p[0]) << 24);
  return std::bit_cast<float>(u);
}

void store_float(float f, bool little, Bytes& out) {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  if (little) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(u >> s));
  } else {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(u >> s));
  }
}

void append(Bytes& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

PfmImage read_pfm_file(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  try {
    return decode_pfm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

}  // namespace

PfmImage decode_pfm(std::span<const std::uint8_t> bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.magic();
  PfmImage img;
  if (magic == "Pf")
    img.channels = 1;
  else if (magic == "PF")
    img.channels = 3;
  else
    throw ParseError("not a PFM file (magic '" + magic + "')", 0);
  const std::size_t dims_at = hr.pos();
  const long w = hr.integer("width");
  const long h = hr.integer("height");
  check_dims(w, h, dims_at);
  const std::size_t scale_at = hr.pos();
  const double scale = hr.real("scale");
  if (scale == 0.0 || !std::isfinite(scale)) throw ParseError("PFM scale must be nonzero", scale_at);
  const std::size_t start = hr.payload_start();

  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * img.channels;
  check_payload(bytes, start, count * 4);

  const bool little = scale < 0.0;
  const bool bottom_up = scale < 0.0;
  const std::size_t row_floats = static_cast<std::size_t>(w) * img.channels;
  img.data.resize(count);
  for (long r = 0; r < h; ++r) {
    const long y = bottom_up ? h - 1 - r : r;
    const std::uint8_t* src = bytes.data() + start + static_cast<std::size_t>(r) * row_floats * 4;
    float* dst = img.data.data() + static_cast<std::size_t>(y) * row_floats;
    for (std::size_t i = 0; i < row_floats; ++i) dst[i] = load_float(src + 4 * i, little);
  }
  return img;
}

Bytes encode_pfm(const PfmImage& img, bool little_endian) {
  if (img.channels != 1 && img.channels != 3) throw ParameterError("PFM supports 1 or 3 channels");
  Bytes out;
  append(out, std::string(img.channels == 1 ? "Pf" : "PF") + "\n" + std::to_string(img.width) + " " +
                  std::to_string(img.height) + "\n" + (little_endian ? "-1.0" : "1.0") + "\n");
  const std::size_t row_floats = static_cast<std::size_t>(img.width) * img.channels;
  out.reserve(out.size() + img.data.size() * 4);
  for (int r = 0; r < img.height; ++r) {
    const int y = little_endian ? img.height - 1 - r : r;
    const float* src = img.data.data() + static_cast<std::size_t>(y) * row_floats;
    for (std::size_t i = 0; i < row_floats; ++i) store_float(src[i], little_endian, out);
  }
  return out;
}

DepthGrid decode_depth_pgm(std::span<const std::uint8_t> bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.magic();
  if (magic != "P5") throw ParseError("not a binary PGM file (magic '" + magic + "')", 0);
  const std::size_t dims_at = hr.pos();
  const long w = hr.integer("width");
  const long h = hr.integer("height");
  check_dims(w, h, dims_at);
  const std::size_t max_at = hr.pos();
  const long maxval = hr.integer("maxval");
  if (maxval != 65535) throw ParseError("depth PGM must be 16-bit with maxval 65535", max_at);
  const std::size_t start = hr.payload_start();
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  check_payload(bytes, start, count * 2);

  DepthGrid d(static_cast<int>(w), static_cast<int>(h), 0.0, false);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned mm = unsigned(bytes[start + 2 * i]) << 8 | unsigned(bytes[start + 2 * i + 1]);
    if (mm == 0) continue;
    d[i] = static_cast<double>(mm) / 1000.0;
    d.set_valid(i, true);
  }
  return d;
}

Bytes encode_depth_pgm(const DepthGrid& d) {
  Bytes out;
  append(out, "P5\n" + std::to_string(d.width()) + " " + std::to_string(d.height()) + "\n65535\n");
  out.reserve(out.size() + d.size() * 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    long mm = 0;
    if (d.valid(i)) {
      if (!std::isfinite(d[i]) || d[i] <= 0.0) throw DomainError("cannot encode nonpositive depth as PGM");
      mm = std::clamp(std::lround(d[i] * 1000.0), 1L, 65535L);
    }
    out.push_back(static_cast<std::uint8_t>(mm >> 8));
    out.push_back(static_cast<std::uint8_t>(mm & 0xff));
  }
  return out;
}

EdgeMap decode_pbm(std::span<const std::uint8_t> bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.magic();
  if (magic != "P4") throw ParseError("not a binary PBM file (magic '" + magic + "')", 0);
  const std::size_t dims_at = hr.pos();
  const long w = hr.integer("width");
  const long h = hr.integer("height");
  check_dims(w, h, dims_at);
  const std::size_t start = hr.payload_start();
  const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
  check_payload(bytes, start, row_bytes * static_cast<std::size_t>(h));

  EdgeMap m(static_cast<int>(w), static_cast<int>(h), 0);
  for (long y = 0; y < h; ++y) {
    const std::uint8_t* row = bytes.data() + start + static_cast<std::size_t>(y) * row_bytes;
    for (long x = 0; x < w; ++x) m(static_cast<int>(x), static_cast<int>(y)) = (row[x / 8] >> (7 - x % 8)) & 1;
  }
  return m;
}

Bytes encode_pbm(const EdgeMap& m) {
  Bytes out;
  append(out, "P4\n" + std::to_string(m.width()) + " " + std::to_string(m.height()) + "\n");
  const std::size_t row_bytes = (static_cast<std::size_t>(m.width()) + 7) / 8;
  for (int y = 0; y < m.height(); ++y) {
    std::vector<std::uint8_t> row(row_bytes, 0);
    for (int x = 0; x < m.width(); ++x)
      if (m(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

DepthFormat depth_format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") return DepthFormat::kPfm;
  if (ext == ".pgm") return DepthFormat::kPgm16;
  throw ParameterError("unknown depth file extension '" + ext + "' (want .pfm or .pgm)");
}

DepthGrid read_depth(const std::filesystem::path& path, DepthFormat format) {
  if (format == DepthFormat::kPgm16) {
    const Bytes bytes = read_file(path);
    try {
      return decode_depth_pgm(bytes);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
  }
  const PfmImage img = read_pfm_file(path);
  if (img.channels != 1) throw ParseError(path.string() + ": depth PFM must have one channel", 0);
  DepthGrid d(img.width, img.height, 0.0, false);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = img.data[i];
    if (!std::isfinite(v) || v <= 0.0) continue;
    d[i] = v;
    d.set_valid(i, true);
  }
  return d;
}

DepthGrid read_depth(const std::filesystem::path& path) { return read_depth(path, depth_format_for(path)); }

void write_depth(const DepthGrid& d, const std::filesystem::path& path, DepthFormat format) {
  if (format == DepthFormat::kPgm16) {
    write_file(path, encode_depth_pgm(d));
    return;
  }
  PfmImage img{d.width(), d.height(), 1, std::vector<float>(d.size(), 0.0f)};
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.valid(i)) img.data[i] = static_cast<float>(d[i]);
  write_file(path, encode_pfm(img));
}

void write_depth(const DepthGrid& d, const std::filesystem::path& path) {
  write_depth(d, path, depth_format_for(path));
}

ProbGrid read_prob(const std::filesystem::path& path) {
  const PfmImage img = read_pfm_file(path);
  if (img.channels != 1) throw ParseError(path.string() + ": probability PFM must have one channel", 0);
  ProbGrid p(img.width, img.height, 0.0, false);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(img.data[i])) continue;
    p[i] = img.data[i];
    p.set_valid(i, true);
  }
  return p;
}

void write_prob(const ProbGrid& p, const std::filesystem::path& path) {
  PfmImage img{p.width(), p.height(), 1, std::vector<float>(p.size(), 0.0f)};
  for (std::size_t i = 0; i < p.size(); ++i)
    img.data[i] = p.valid(i) ? static_cast<float>(p[i]) : std::numeric_limits<float>::quiet_NaN();
  write_file(path, encode_pfm(img));
}

NormalGrid read_normals(const std::filesystem::path& path) {
  const PfmImage img = read_pfm_file(path);
  if (img.channels != 3) throw ParseError(path.string() + ": normals PFM must have three channels", 0);
  NormalGrid n(img.width, img.height, Vec3{0.0, 0.0, 0.0}, false);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Vec3 v{img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]};
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) continue;
    if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0) continue;
    n[i] = v;
    n.set_valid(i, true);
  }
  return n;
}

void write_normals(const NormalGrid& n, const std::filesystem::path& path) {
  PfmImage img{n.width(), n.height(), 3, std::vector<float>(n.size() * 3, 0.0f)};
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!n.valid(i)) continue;
    for (int k = 0; k < 3; ++k) img.data[3 * i + k] = static_cast<float>(n[i][k]);
  }
  write_file(path, encode_pfm(img));
}

EdgeMap read_mask(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  try {
    return decode_pbm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_mask(const EdgeMap& m, const std::filesystem::path& path) { write_file(path, encode_pbm(m)); }

}  // namespace depthedge::imageio
