#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "depthedge/imageio/dataset.hpp"
#include "depthedge/imageio/pnm.hpp"
#include "depthedge/imageio/report_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace depthedge;
using namespace depthedge::imageio;

namespace {

Bytes bytes_of(const std::string& header, std::initializer_list<std::uint8_t> payload = {}) {
  Bytes b(header.begin(), header.end());
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

void append_be_float(Bytes& b, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(u >> s));
}

std::size_t parse_offset(const Bytes& b, auto decode) {
  try {
    decode(b);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a ParseError");
  return 0;
}

}  // namespace

TEST_CASE("PFM 2x2 round-trips bit-exactly") {
  testing::TempDir tmp;
  DepthGrid d(2, 2, 0.0, true);
  d(0, 0) = 1.0;
  d(1, 0) = 2.0;
  d(0, 1) = 3.0;
  d(1, 1) = 4.0;
  write_depth(d, tmp / "a.pfm");
  const Bytes raw = read_file(tmp / "a.pfm");
  const std::string header = "Pf\n2 2\n-1.0\n";
  REQUIRE(raw.size() == header.size() + 16);
  CHECK(std::string(raw.begin(), raw.begin() + header.size()) == header);
  // little-endian, bottom row first
  float first;
  std::memcpy(&first, raw.data() + header.size(), 4);
  CHECK(first == 3.0f);

  const DepthGrid back = read_depth(tmp / "a.pfm");
  CHECK(back == d);
  write_depth(back, tmp / "b.pfm");
  CHECK(read_file(tmp / "b.pfm") == raw);
}

TEST_CASE("PFM with positive scale is big-endian, top row first") {
  Bytes b = bytes_of("Pf\n2 1\n1.0\n");
  append_be_float(b, 5.0f);
  append_be_float(b, 6.0f);
  PfmImage img = decode_pfm(b);
  REQUIRE(img.width == 2);
  CHECK(img.data[0] == 5.0f);
  CHECK(img.data[1] == 6.0f);

  Bytes tall = bytes_of("Pf\n1 2\n1.0\n");
  append_be_float(tall, 7.0f);
  append_be_float(tall, 8.0f);
  img = decode_pfm(tall);
  CHECK(img.data[0] == 7.0f);  // top row
  CHECK(encode_pfm(img, false) == tall);
}

TEST_CASE("PFM header comments and three channels") {
  PfmImage img{2, 1, 3, {1, 2, 3, 4, 5, 6}};
  const Bytes enc = encode_pfm(img);
  CHECK(decode_pfm(enc).data == img.data);

  Bytes commented = bytes_of("PF\n# made by hand\n2 1\n-1.0\n");
  commented.insert(commented.end(), enc.end() - 24, enc.end());
  CHECK(decode_pfm(commented).data == img.data);
}

TEST_CASE("normals round-trip; zero vectors are invalid") {
  testing::TempDir tmp;
  NormalGrid n(2, 2, Vec3{0.0, 0.0, -1.0}, true);
  n(1, 1) = Vec3{0.6, 0.0, -0.8};
  n.set_valid(0, 1, false);
  n(0, 1) = Vec3{0.0, 0.0, 0.0};
  write_normals(n, tmp / "x.normals.pfm");
  const NormalGrid back = read_normals(tmp / "x.normals.pfm");
  CHECK_FALSE(back.valid(0, 1));
  CHECK(back.valid(1, 1));
  CHECK(back(1, 1)[0] == static_cast<double>(0.6f));
  CHECK_THROWS_AS(read_depth(tmp / "x.normals.pfm"), ParseError);  // three channels
}

TEST_CASE("probability grids keep invalid pixels as NaN") {
  testing::TempDir tmp;
  ProbGrid p(3, 1, 0.25, true);
  p.set_valid(2, 0, false);
  write_prob(p, tmp / "p.pfm");
  const ProbGrid back = read_prob(tmp / "p.pfm");
  CHECK(back.valid(0, 0));
  CHECK_FALSE(back.valid(2, 0));
  CHECK(back(1, 0) == 0.25);
}

TEST_CASE("16-bit PGM in millimetres") {
  const Bytes b = bytes_of("P5\n2 1\n65535\n", {0x05, 0xDC, 0x00, 0x00});
  const DepthGrid d = decode_depth_pgm(b);
  CHECK(d(0, 0) == 1.5);
  CHECK(d.valid(0, 0));
  CHECK_FALSE(d.valid(1, 0));
  CHECK(encode_depth_pgm(d) == b);

  // every 16-bit integer survives the conversion
  DepthGrid all(256, 256, 0.0, true);
  Bytes raw = bytes_of("P5\n256 256\n65535\n");
  for (int v = 0; v < 65536; ++v) {
    raw.push_back(static_cast<std::uint8_t>(v >> 8));
    raw.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  CHECK(encode_depth_pgm(decode_depth_pgm(raw)) == raw);
  CHECK_THROWS_AS(decode_depth_pgm(bytes_of("P5\n1 1\n255\n", {1})), ParseError);
}

TEST_CASE("PBM bit packing") {
  EdgeMap m = decode_pbm(bytes_of("P4\n8 1\n", {0x00}));
  CHECK(popcount(m) == 0);
  m = decode_pbm(bytes_of("P4\n8 1\n", {0x80}));
  CHECK(m(0, 0) == 1);
  CHECK(popcount(m) == 1);

  const Bytes nine = bytes_of("P4\n9 2\n", {0xFF, 0x80, 0x00, 0x80});
  m = decode_pbm(nine);
  CHECK(popcount(m) == 10);
  CHECK(m(8, 0) == 1);
  CHECK(m(8, 1) == 1);
  CHECK(m(0, 1) == 0);
  CHECK(encode_pbm(m) == nine);
  CHECK_THROWS_AS(decode_pbm(bytes_of("P4\n9 2\n", {0xFF, 0x80, 0x00})), ParseError);
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK(parse_offset(bytes_of("P6\n1 1\n"), [](const Bytes& b) { return decode_pbm(b); }) == 0);
  CHECK(parse_offset(bytes_of("Pf\n2 x\n-1.0\n"), [](const Bytes& b) { return decode_pfm(b); }) == 5);
  CHECK(parse_offset(bytes_of("Pf\n0 2\n-1.0\n"), [](const Bytes& b) { return decode_pfm(b); }) == 2);
  // truncated payload: offset is the end of the data
  const Bytes short_pfm = bytes_of("Pf\n2 2\n-1.0\n", {0, 0, 0x80, 0x3f});
  CHECK(parse_offset(short_pfm, [](const Bytes& b) { return decode_pfm(b); }) == short_pfm.size());
  CHECK(parse_offset(bytes_of("P4\n8"), [](const Bytes& b) { return decode_pbm(b); }) == 4);
  CHECK(parse_offset(bytes_of("P"), [](const Bytes& b) { return decode_pbm(b); }) == 0);
}

TEST_CASE("depth format from the extension") {
  CHECK(depth_format_for("a/b.pfm") == DepthFormat::kPfm);
  CHECK(depth_format_for("b.pgm") == DepthFormat::kPgm16);
  CHECK_THROWS_AS(depth_format_for("b.png"), ParameterError);
  CHECK_THROWS_AS(read_file("/nonexistent/file.pfm"), IoError);
}

namespace {

metrics::EvalReport sample_report() {
  metrics::EvalReport r;
  r.id = "img0";
  r.delta1 = 0.1 + 0.2;  // not exactly representable in decimal
  r.delta2 = 0.9;
  r.delta3 = 1.0;
  r.rel = 1.0 / 3.0;
  r.log10 = 0.047;
  r.rmse_lin = 0.495;
  r.rmse_log = 0.157;
  r.valid_pixels = 12345;
  r.dde_0 = 90.0;
  r.dde_minus = 4.0;
  r.dde_plus = 6.0;
  r.config.crop = metrics::CropSpec::parse("eigen");
  r.config.clip.reset();
  for (const edges::SigmaPreset& p : edges::standard_presets()) {
    metrics::DbeEntry e;
    e.label = p.name;
    e.sigma_low = p.sigma_low;
    e.sigma_high = p.sigma_high;
    e.acc = p.sigma_low * 7.0;
    e.pred_edge_pixels = 10;
    e.acc_truncated_fraction = 0.25;
    e.images = 1;
    r.dbe.push_back(e);
  }
  return r;
}

}  // namespace

TEST_CASE("report JSON round-trips exactly") {
  testing::TempDir tmp;
  const metrics::EvalReport r = sample_report();
  write_report(r, tmp / "r.json");
  const metrics::EvalReport back = read_report(tmp / "r.json");
  CHECK(back == r);

  const Json j = report_to_json(r);
  CHECK(j["schema_version"] == 1);
  CHECK(j["dbe_acc"]["0.1_0.2"] == r.dbe[0].acc.value());
  CHECK(j["dbe_comp"]["0.1_0.2"].is_null());
  CHECK(j["config"]["crop"] == "eigen");
  CHECK(j["config"]["clip"].is_null());
  CHECK_FALSE(j.contains("timestamp"));

  Json bad = j;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(bad), ParseError);
  bad = j;
  bad.erase("rmse_lin");
  CHECK_THROWS_AS(report_from_json(bad), ParseError);
}

TEST_CASE("perfect report serializes delta1 = 1.0 and rmse_lin = 0.0") {
  metrics::EvalReport r;
  r.delta1 = r.delta2 = r.delta3 = 1.0;
  const std::string text = dump_json(report_to_json(r));
  CHECK(text.find("\"delta1\": 1.0") != std::string::npos);
  CHECK(text.find("\"rmse_lin\": 0.0") != std::string::npos);
}

TEST_CASE("table rows") {
  const metrics::EvalReport r = sample_report();
  const auto& presets = edges::standard_presets();
  CHECK(table_header(presets) ==
        "method,delta1,delta2,delta3,rel,log10,rmse_lin,rmse_log,dbe_acc_0.1_0.2,dbe_acc_0.01_0.1,"
        "dbe_acc_0.005_0.06,dbe_acc_0.03_0.05\n");
  CHECK(table_row("m", r, presets) == "m,0.300,0.900,1.000,0.333,0.047,0.495,0.157,0.700,0.070,0.035,0.210\n");
  metrics::EvalReport missing = r;
  missing.dbe[1].acc.reset();
  CHECK(table_row("a,b", missing, presets).rfind("\"a,b\",", 0) == 0);
  CHECK(table_row("m", missing, presets).find(",undefined,") != std::string::npos);
}

TEST_CASE("dataset pairing by id") {
  testing::TempDir tmp;
  const auto pred = tmp / "pred", gt = tmp / "gt";
  std::filesystem::create_directories(pred);
  std::filesystem::create_directories(gt);
  auto touch = [](const std::filesystem::path& p) { std::ofstream(p) << "x"; };
  touch(pred / "b.pfm");
  touch(pred / "a.pgm");
  touch(pred / "a.contours.pfm");
  touch(pred / "only_pred.pfm");
  touch(pred / "notes.txt");
  touch(gt / "a.pfm");
  touch(gt / "a.pbm");
  touch(gt / "a.normals.pfm");
  touch(gt / "b.pfm");
  touch(gt / "only_gt.pgm");

  const DatasetPairing p = pair_directories(pred, gt);
  REQUIRE(p.entries.size() == 2);
  CHECK(p.entries[0].id == "a");
  CHECK(p.entries[0].pred_depth == pred / "a.pgm");
  CHECK(p.entries[0].gt_contours == gt / "a.pbm");
  CHECK(p.entries[0].gt_normals == gt / "a.normals.pfm");
  CHECK(p.entries[0].pred_contours == pred / "a.contours.pfm");
  CHECK_FALSE(p.entries[1].gt_contours.has_value());
  REQUIRE(p.unmatched.size() == 2);
  CHECK(p.unmatched[0].rfind("only_gt", 0) == 0);
  CHECK(p.unmatched[1].rfind("only_pred", 0) == 0);

  touch(pred / "b.pgm");
  const DatasetPairing dup = pair_directories(pred, gt);
  CHECK(std::any_of(dup.unmatched.begin(), dup.unmatched.end(),
                    [](const std::string& s) { return s.find("ambiguous") != std::string::npos; }));
  CHECK_THROWS_AS(index_directory(tmp / "missing"), IoError);
}
