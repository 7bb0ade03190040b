#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <regex>

#include "depthedge/cli/cli.hpp"
#include "depthedge/imageio/dataset.hpp"
#include "depthedge/imageio/pnm.hpp"
#include "depthedge/imageio/report_io.hpp"
#include "depthedge/losses/gradcheck.hpp"
#include "depthedge/metrics/evaluate.hpp"
#include "depthedge/synth/scene.hpp"
#include "pool.hpp"

namespace fs = std::filesystem;

namespace depthedge::cli {
namespace {

using imageio::Json;

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

const fs::path& require_dir(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw ParameterError(std::string(flag) + " is required");
  if (!fs::is_directory(*p)) throw ParameterError(std::string(flag) + ": not a directory: " + p->string());
  return *p;
}

std::string method_name(const RunConfig& cfg) {
  if (!cfg.method.empty()) return cfg.method;
  fs::path p = cfg.pred_dir->lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  const std::string name = p.filename().string();
  return name.empty() ? "prediction" : name;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g17(const std::optional<double>& v) { return v ? g17(*v) : "undefined"; }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

struct Failure {
  std::string id;
  std::string error;
};

void write_failures(const fs::path& out, const std::vector<std::string>& unmatched, const std::vector<Failure>& failed) {
  Json j;
  j["unmatched"] = unmatched;
  Json f = Json::array();
  for (const Failure& x : failed) f.push_back({{"id", x.id}, {"error", x.error}});
  j["failed"] = f;
  imageio::write_text(out / "failures.json", imageio::dump_json(j));
}

void report_problems(std::ostream& err, const std::vector<std::string>& unmatched, const std::vector<Failure>& failed) {
  for (const std::string& u : unmatched) err << "unmatched: " << u << "\n";
  for (const Failure& f : failed) err << "failed: " << f.id << ": " << f.error << "\n";
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path& pred = require_dir(cfg.pred_dir, "--pred");
  const fs::path& gt = require_dir(cfg.gt_dir, "--gt");
  if (cfg.annotations_dir) require_dir(cfg.annotations_dir, "--annotations");
  cfg.eval.validate();
  const fs::path dir = prepare_dir(cfg.out);
  const fs::path report_dir = prepare_dir(dir / "reports");

  const imageio::DatasetPairing pairing = imageio::pair_directories(pred, gt, cfg.annotations_dir);
  const std::size_t n = pairing.entries.size();
  std::vector<std::optional<metrics::EvalReport>> reports(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    try {
      reports[i] = metrics::evaluate(pairing.entries[i], cfg.eval);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  const std::optional<std::string> stamp = cfg.timestamp ? std::optional(utc_timestamp()) : std::nullopt;
  std::vector<metrics::EvalReport> ok;
  std::vector<Failure> failed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reports[i]) {
      failed.push_back({pairing.entries[i].id, errors[i]});
      continue;
    }
    reports[i]->timestamp = stamp;
    imageio::write_report(*reports[i], report_dir / (reports[i]->id + ".json"));
    ok.push_back(*reports[i]);
  }
  write_failures(dir, pairing.unmatched, failed);
  report_problems(err, pairing.unmatched, failed);

  if (ok.empty()) {
    err << "no image could be evaluated\n";
    return kExitPartial;
  }
  metrics::EvalReport agg = metrics::aggregate(ok, cfg.eval);
  agg.timestamp = stamp;
  imageio::write_report(agg, dir / "aggregate.json");

  const std::string table = imageio::table_header(cfg.eval.presets) +
                            imageio::table_row(method_name(cfg), agg, cfg.eval.presets);
  imageio::write_text(dir / "table.csv", table);
  std::string details = imageio::detail_header(cfg.eval.presets);
  for (const metrics::EvalReport& r : ok) details += imageio::detail_row(r, cfg.eval.presets);
  imageio::write_text(dir / "images.csv", details);

  out << table;
  out << ok.size() << " evaluated, " << failed.size() << " failed, " << pairing.unmatched.size() << " unmatched\n";
  return (failed.empty() && pairing.unmatched.empty()) ? kExitOk : kExitPartial;
}

int cmd_dbe(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path& pred = require_dir(cfg.pred_dir, "--pred");
  const fs::path& gt = require_dir(cfg.gt_dir, "--gt");
  cfg.eval.validate();
  const fs::path dir = prepare_dir(cfg.out);

  const imageio::DirectoryIndex pi = imageio::index_directory(pred);
  const imageio::DirectoryIndex gi = imageio::index_directory(gt);
  struct Item {
    std::string id;
    fs::path depth, edges;
  };
  std::vector<Item> items;
  std::vector<std::string> unmatched = pi.problems;
  for (const std::string& p : gi.problems) unmatched.push_back(p);
  for (const auto& [id, f] : pi.items) {
    if (!f.depth) continue;
    const imageio::DirectoryIndex::Files* g = gi.find(id);
    if (!g || !g->contours) {
      unmatched.push_back(id + ": no contour annotation");
      continue;
    }
    items.push_back({id, *f.depth, *g->contours});
  }
  for (const auto& [id, g] : gi.items) {
    const imageio::DirectoryIndex::Files* f = pi.find(id);
    if (g.contours && (!f || !f->depth)) unmatched.push_back(id + ": no predicted depth");
  }
  std::sort(unmatched.begin(), unmatched.end());

  const std::size_t n = items.size();
  std::vector<std::optional<std::vector<metrics::DbeEntry>>> results(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    try {
      const DepthGrid d = imageio::read_depth(items[i].depth);
      const EdgeMap e = imageio::read_mask(items[i].edges);
      const DepthGrid clipped = cfg.eval.clip ? metrics::clip_depth(d, *cfg.eval.clip) : d;
      results[i] = metrics::dbe_for_prediction(clipped, &e, cfg.eval, cfg.eval.presets);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  std::vector<Failure> failed;
  std::string csv =
      "id,preset,sigma_low,sigma_high,dbe_acc,dbe_comp,pred_edge_pixels,gt_edge_pixels,acc_truncated_fraction,"
      "acc_degenerate\n";
  Json images = Json::array();
  const std::size_t np = cfg.eval.presets.size();
  std::vector<double> acc_sum(np, 0.0), comp_sum(np, 0.0);
  std::vector<std::size_t> acc_n(np, 0), comp_n(np, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) {
      failed.push_back({items[i].id, errors[i]});
      continue;
    }
    Json per = Json::object();
    for (std::size_t k = 0; k < np; ++k) {
      const metrics::DbeEntry& e = (*results[i])[k];
      csv += imageio::csv_field(items[i].id) + "," + e.label + "," + g17(e.sigma_low) + "," + g17(e.sigma_high) + "," +
             g17(e.acc) + "," + g17(e.comp) + "," + std::to_string(e.pred_edge_pixels) + "," +
             std::to_string(e.gt_edge_pixels) + "," + g17(e.acc_truncated_fraction) + "," +
             (e.acc_degenerate ? "1" : "0") + "\n";
      per[e.label] = {{"acc", opt_json(e.acc)},
                      {"comp", opt_json(e.comp)},
                      {"pred_edge_pixels", e.pred_edge_pixels},
                      {"gt_edge_pixels", e.gt_edge_pixels},
                      {"acc_truncated_fraction", e.acc_truncated_fraction},
                      {"acc_degenerate", e.acc_degenerate}};
      if (e.acc) acc_sum[k] += *e.acc, ++acc_n[k];
      if (e.comp) comp_sum[k] += *e.comp, ++comp_n[k];
    }
    images.push_back({{"id", items[i].id}, {"dbe", per}});
  }

  Json means = Json::object();
  out << "preset,mean_dbe_acc,mean_dbe_comp,images\n";
  for (std::size_t k = 0; k < np; ++k) {
    const edges::SigmaPreset& p = cfg.eval.presets[k];
    const std::optional<double> a = acc_n[k] ? std::optional(acc_sum[k] / acc_n[k]) : std::nullopt;
    const std::optional<double> c = comp_n[k] ? std::optional(comp_sum[k] / comp_n[k]) : std::nullopt;
    csv += "mean," + p.name + "," + g17(p.sigma_low) + "," + g17(p.sigma_high) + "," + g17(a) + "," + g17(c) + ",,,,\n";
    means[p.name] = {{"acc", opt_json(a)}, {"comp", opt_json(c)}, {"images_with_acc", acc_n[k]}};
    out << p.name << "," << imageio::format_cell(a) << "," << imageio::format_cell(c) << "," << acc_n[k] << "\n";
  }
  imageio::write_text(dir / "dbe.csv", csv);

  Json j;
  j["schema_version"] = metrics::kReportSchemaVersion;
  j["config"] = imageio::config_to_json(cfg.eval);
  j["images"] = images;
  j["mean"] = means;
  if (cfg.timestamp) j["timestamp"] = utc_timestamp();
  imageio::write_text(dir / "dbe.json", imageio::dump_json(j));
  write_failures(dir, unmatched, failed);
  report_problems(err, unmatched, failed);
  return (failed.empty() && unmatched.empty() && n > 0) ? kExitOk : kExitPartial;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path& pred = require_dir(cfg.pred_dir, "--pred");
  const fs::path& gt = require_dir(cfg.gt_dir, "--gt");
  if (cfg.annotations_dir) require_dir(cfg.annotations_dir, "--annotations");
  if (cfg.samples < 1) throw ParameterError("--samples must be >= 1");
  cfg.eval.validate();
  const fs::path dir = prepare_dir(cfg.out);

  const imageio::DatasetPairing pairing = imageio::pair_directories(pred, gt, cfg.annotations_dir);
  struct Loaded {
    std::optional<ScalarField> normalized;  // empty for a flat prediction
    EdgeMap edges;
    double rmse_log = 0.0;
  };
  const std::size_t n = pairing.entries.size();
  std::vector<std::optional<Loaded>> loaded(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    try {
      const imageio::DatasetEntry& e = pairing.entries[i];
      if (!e.gt_contours) throw ParameterError("no contour annotation");
      const DepthGrid p = imageio::read_depth(e.pred_depth);
      const DepthGrid g = imageio::read_depth(e.gt_depth);
      Loaded l;
      l.edges = imageio::read_mask(*e.gt_contours);
      require_same_shape(p, g, "sweep");
      require_same_shape(p, l.edges, "sweep (edge annotation)");
      const DepthGrid clipped = cfg.eval.clip ? metrics::clip_depth(p, *cfg.eval.clip) : p;
      const std::optional<metrics::Rect> rect = cfg.eval.crop.resolve(p.width(), p.height());
      l.rmse_log = metrics::standard_metrics(rect ? metrics::crop(clipped, *rect) : clipped,
                                             rect ? metrics::crop(g, *rect) : g)
                       .errors.rmse_log;
      try {
        l.normalized = edges::normalize_depth(clipped);
      } catch (const DegenerateRangeError&) {
      }
      loaded[i] = std::move(l);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  std::vector<Failure> failed;
  std::vector<const Loaded*> ok;
  for (std::size_t i = 0; i < n; ++i) {
    if (loaded[i])
      ok.push_back(&*loaded[i]);
    else
      failed.push_back({pairing.entries[i].id, errors[i]});
  }
  report_problems(err, pairing.unmatched, failed);
  write_failures(dir, pairing.unmatched, failed);
  if (ok.empty()) {
    err << "no image could be loaded\n";
    return kExitPartial;
  }
  double rmse_log = 0.0;
  for (const Loaded* l : ok) rmse_log += l->rmse_log;
  rmse_log /= static_cast<double>(ok.size());

  std::mt19937_64 rng(cfg.seed);
  std::string csv = "sample,sigma_low,sigma_high,dbe_acc,rmse_log,images_defined\n";
  for (int s = 0; s < cfg.samples; ++s) {
    double lo = 0.0, hi = 0.0;
    do {
      const double u = uniform01(rng), v = uniform01(rng);
      lo = std::min(u, v);
      hi = std::max(u, v);
    } while (!(lo > 0.0 && lo < hi));
    std::vector<std::optional<double>> acc(ok.size());
    parallel_for(ok.size(), cfg.jobs, [&](std::size_t i) {
      if (!ok[i]->normalized) return;
      const EdgeMap det = edges::canny(*ok[i]->normalized, {lo, hi, cfg.eval.gauss_sigma});
      if (popcount(det) == 0) return;
      acc[i] = edges::truncated_chamfer(det, ok[i]->edges, cfg.eval.theta).value;
    });
    double sum = 0.0;
    std::size_t defined = 0;
    for (const std::optional<double>& a : acc)
      if (a) sum += *a, ++defined;
    const std::optional<double> mean = defined ? std::optional(sum / defined) : std::nullopt;
    csv += std::to_string(s) + "," + g17(lo) + "," + g17(hi) + "," + g17(mean) + "," + g17(rmse_log) + "," +
           std::to_string(defined) + "\n";
  }
  imageio::write_text(dir / "sweep.csv", csv);
  out << cfg.samples << " samples over " << ok.size() << " images written to " << (dir / "sweep.csv").string()
      << "\n";
  return (failed.empty() && pairing.unmatched.empty()) ? kExitOk : kExitPartial;
}

int cmd_losses(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path& pred = require_dir(cfg.pred_dir, "--pred");
  const fs::path& gt = require_dir(cfg.gt_dir, "--gt");
  cfg.weights.validate();
  cfg.loss_options.attention.validate();
  const fs::path dir = prepare_dir(cfg.out);

  const imageio::DirectoryIndex pi = imageio::index_directory(pred);
  const imageio::DirectoryIndex gi = imageio::index_directory(gt);
  std::vector<std::string> unmatched = pi.problems;
  for (const std::string& p : gi.problems) unmatched.push_back(p);
  struct Item {
    std::string id;
    imageio::DirectoryIndex::Files p, g;
  };
  std::vector<Item> items;
  for (const auto& [id, f] : pi.items) {
    if (!f.depth) continue;
    const imageio::DirectoryIndex::Files* g = gi.find(id);
    std::string missing;
    if (!f.contour_probs) missing += " predicted contours";
    if (!f.normals) missing += " predicted normals";
    if (!g || !g->depth) missing += " ground-truth depth";
    if (!g || !g->contours) missing += " ground-truth contours";
    if (!g || !g->normals) missing += " ground-truth normals";
    if (!missing.empty()) {
      unmatched.push_back(id + ": missing" + missing);
      continue;
    }
    items.push_back({id, f, *g});
  }
  std::sort(unmatched.begin(), unmatched.end());

  const std::size_t n = items.size();
  std::vector<std::optional<losses::TotalLoss>> results(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    try {
      const Item& it = items[i];
      const DepthGrid pd = imageio::read_depth(*it.p.depth);
      const DepthGrid gd = imageio::read_depth(*it.g.depth);
      const ProbGrid pc = imageio::read_prob(*it.p.contour_probs);
      const ProbGrid gc = synth::contour_probabilities(imageio::read_mask(*it.g.contours));
      const NormalGrid pn = imageio::read_normals(*it.p.normals);
      const NormalGrid gn = imageio::read_normals(*it.g.normals);
      losses::LossInputs in{&pd, &gd, &pc, &gc, &pn, &gn};
      results[i] = losses::total_loss(in, cfg.weights, cfg.loss_options);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  std::vector<Failure> failed;
  std::string csv = "id,total,depth,contour,normals,depth_contour,depth_normal\n";
  Json images = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) {
      failed.push_back({items[i].id, errors[i]});
      continue;
    }
    const losses::TotalLoss& t = *results[i];
    csv += imageio::csv_field(items[i].id) + "," + g17(t.total.value) + "," + g17(t.depth) + "," + g17(t.contour) +
           "," + g17(t.normals) + "," + g17(t.depth_contour) + "," + g17(t.depth_normal) + "\n";
    images.push_back({{"id", items[i].id},
                      {"total", t.total.value},
                      {"depth", t.depth},
                      {"contour", t.contour},
                      {"normals", t.normals},
                      {"depth_contour", t.depth_contour},
                      {"depth_normal", t.depth_normal}});
  }
  imageio::write_text(dir / "losses.csv", csv);
  Json j;
  j["schema_version"] = metrics::kReportSchemaVersion;
  j["weights"] = {{"lambda_d", cfg.weights.lambda_d},
                  {"lambda_c", cfg.weights.lambda_c},
                  {"lambda_n", cfg.weights.lambda_n},
                  {"mu", cfg.weights.mu}};
  j["attention"] = {{"beta", cfg.loss_options.attention.beta}, {"gamma", cfg.loss_options.attention.gamma}};
  j["images"] = images;
  if (cfg.timestamp) j["timestamp"] = utc_timestamp();
  imageio::write_text(dir / "losses.json", imageio::dump_json(j));
  write_failures(dir, unmatched, failed);
  report_problems(err, unmatched, failed);
  out << csv;
  return (failed.empty() && unmatched.empty() && n > 0) ? kExitOk : kExitPartial;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!(cfg.tol > 0.0)) throw ParameterError("--tol must be > 0");
  cfg.weights.validate();
  const std::vector<losses::Term> terms = cfg.terms.empty() ? losses::all_terms() : cfg.terms;
  std::vector<losses::GradcheckReport> reports(terms.size());
  // ParameterError from bad size/step propagates as a config error
  parallel_for(terms.size(), cfg.jobs, [&](std::size_t i) {
    reports[i] = losses::gradcheck(terms[i], cfg.seed, cfg.grad_size, cfg.grad_step, cfg.weights, cfg.loss_options);
  });
  const fs::path dir = prepare_dir(cfg.out);
  std::string csv = "term,max_rel_error,checked,excluded,status\n";
  bool pass = true;
  for (const losses::GradcheckReport& r : reports) {
    const bool ok = r.max_rel_error <= cfg.tol && r.checked > 0;
    pass = pass && ok;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_error);
    csv += std::string(losses::term_name(r.term)) + "," + buf + "," + std::to_string(r.checked) + "," +
           std::to_string(r.excluded) + "," + (ok ? "PASS" : "FAIL") + "\n";
  }
  imageio::write_text(dir / "gradcheck.csv", csv);
  out << csv;
  return pass ? kExitOk : kExitPartial;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.spec_file) throw ParameterError("--spec is required");
  std::ifstream in(*cfg.spec_file, std::ios::binary);
  if (!in) throw ParameterError("cannot read scene spec " + cfg.spec_file->string());
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(cfg.spec_file->string() + ": " + e.what());
  }
  if (!spec.is_object()) throw ParameterError("scene spec must be a JSON object");

  struct Job {
    std::string id;
    synth::SceneSpec scene;
    int shift = 0;
  };
  std::vector<Job> jobs;
  static const std::regex id_re("[A-Za-z0-9_-]+");
  try {
    for (const Json& s : spec.value("scenes", Json::array())) {
      Job j{s.at("id").get<std::string>(), synth::scene_from_json(nlohmann::json::parse(s.dump())),
            s.value("shift", 0)};
      jobs.push_back(std::move(j));
    }
    if (spec.contains("generate")) {
      const Json& g = spec["generate"];
      synth::RandomSceneOptions o;
      o.width = g.value("width", o.width);
      o.height = g.value("height", o.height);
      o.min_primitives = g.value("min_primitives", o.min_primitives);
      o.max_primitives = g.value("max_primitives", o.max_primitives);
      o.depth_min = g.value("depth_min", o.depth_min);
      o.depth_max = g.value("depth_max", o.depth_max);
      o.min_gap = g.value("min_gap", o.min_gap);
      o.margin = g.value("margin", o.margin);
      if (g.contains("kinds")) {
        o.rects = o.disks = o.slanted = o.hemispheres = false;
        for (const Json& k : g["kinds"]) {
          const std::string kind = k.get<std::string>();
          if (kind == "rect") o.rects = true;
          else if (kind == "disk") o.disks = true;
          else if (kind == "slanted") o.slanted = true;
          else if (kind == "hemisphere") o.hemispheres = true;
          else throw ParameterError("unknown primitive kind '" + kind + "'");
        }
      }
      const std::uint64_t seed = cfg.seed_set ? cfg.seed : g.value("seed", std::uint64_t{0});
      const int count = g.value("count", 1);
      if (count < 0) throw ParameterError("generate.count must be >= 0");
      const std::string prefix = g.value("prefix", std::string("scene"));
      synth::NoiseSpec noise;
      if (g.contains("noise")) {
        noise.sigma = g["noise"].value("sigma", 0.0);
        noise.fatten = g["noise"].value("fatten", 0);
      }
      for (int i = 0; i < count; ++i) {
        char id[64];
        std::snprintf(id, sizeof id, "%s%04d", prefix.c_str(), i);
        Job j{id, synth::random_scene(o, seed + static_cast<std::uint64_t>(i)), g.value("shift", 0)};
        j.scene.noise = noise;
        jobs.push_back(std::move(j));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(cfg.spec_file->string() + ": " + e.what());
  }
  for (const Job& j : jobs) {
    if (!std::regex_match(j.id, id_re)) throw ParameterError("scene id '" + j.id + "' must match [A-Za-z0-9_-]+");
    j.scene.validate();
  }

  const fs::path dir = prepare_dir(cfg.out);
  const fs::path gt_dir = prepare_dir(dir / "gt");
  const fs::path pred_dir = prepare_dir(dir / "pred");
  std::vector<double> gaps(jobs.size(), 0.0);
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const Job& j = jobs[i];
      const synth::SceneTruth truth = synth::render(j.scene);
      gaps[i] = truth.gap_threshold;
      imageio::write_depth(truth.depth, gt_dir / (j.id + ".pfm"));
      imageio::write_mask(truth.contours, gt_dir / (j.id + ".pbm"));
      imageio::write_normals(truth.normals, gt_dir / (j.id + ".normals.pfm"));
      const synth::SceneTruth moved = synth::shift_edges(truth, j.shift);
      imageio::write_depth(synth::perturb(moved, j.scene.noise, j.scene.seed), pred_dir / (j.id + ".pfm"));
      imageio::write_prob(synth::contour_probabilities(moved.contours), pred_dir / (j.id + ".contours.pfm"));
      imageio::write_normals(moved.normals, pred_dir / (j.id + ".normals.pfm"));
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  Json manifest = Json::array();
  std::vector<Failure> failed;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i].empty()) {
      failed.push_back({jobs[i].id, errors[i]});
      continue;
    }
    manifest.push_back({{"id", jobs[i].id},
                        {"shift", jobs[i].shift},
                        {"gap_threshold", gaps[i]},
                        {"spec", synth::scene_to_json(jobs[i].scene)}});
  }
  imageio::write_text(dir / "scenes.json", imageio::dump_json(manifest));
  write_failures(dir, {}, failed);
  report_problems(err, {}, failed);
  out << manifest.size() << " scenes written to " << dir.string() << "\n";
  return failed.empty() ? kExitOk : kExitPartial;
}

}  // namespace depthedge::cli
