#include "depthedge/cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "depthedge/losses/gradcheck.hpp"
#include "toml.hpp"

namespace depthedge::cli {
namespace {

[[noreturn]] void config_error(const std::string& source, const std::string& msg) {
  throw ParameterError(source + ": " + msg);
}

double num(const toml::node& n, const std::string& where) {
  if (auto v = n.value<double>()) return *v;
  config_error(where, "expected a number");
}

std::int64_t integer(const toml::node& n, const std::string& where) {
  if (auto v = n.value<std::int64_t>()) return *v;
  config_error(where, "expected an integer");
}

bool boolean(const toml::node& n, const std::string& where) {
  if (auto v = n.value<bool>()) return *v;
  config_error(where, "expected true or false");
}

std::string text(const toml::node& n, const std::string& where) {
  if (auto v = n.value<std::string>()) return *v;
  config_error(where, "expected a string");
}

std::vector<std::string> strings(const toml::node& n, const std::string& where) {
  std::vector<std::string> out;
  if (const toml::array* a = n.as_array()) {
    for (const toml::node& e : *a) out.push_back(text(e, where));
    return out;
  }
  out.push_back(text(n, where));
  return out;
}

std::vector<edges::SigmaPreset> presets_from_names(const std::vector<std::string>& names) {
  std::vector<edges::SigmaPreset> out;
  for (const std::string& name : names) {
    if (name == "all") {
      for (const edges::SigmaPreset& p : edges::standard_presets()) out.push_back(p);
      continue;
    }
    const edges::SigmaPreset* p = edges::find_preset(name);
    if (!p) throw ParameterError("unknown preset '" + name + "' (known: 0.1_0.2, 0.01_0.1, 0.005_0.06, 0.03_0.05, all)");
    out.push_back(*p);
  }
  return out;
}

losses::AlphaMode parse_alpha_mode(const std::string& s) {
  if (s == "contour") return losses::AlphaMode::kContourFraction;
  if (s == "non_contour") return losses::AlphaMode::kNonContourFraction;
  throw ParameterError("alpha_mode must be 'contour' or 'non_contour'");
}

losses::ContourNorm parse_contour_norm(const std::string& s) {
  if (s == "mean") return losses::ContourNorm::kMean;
  if (s == "l2") return losses::ContourNorm::kL2Mean;
  throw ParameterError("contour_norm must be 'mean' or 'l2'");
}

losses::NormalConvention parse_convention(const std::string& s) {
  if (s == "camera") return losses::NormalConvention::kCameraFacing;
  if (s == "outward") return losses::NormalConvention::kOutward;
  throw ParameterError("convention must be 'camera' or 'outward'");
}

std::vector<losses::Term> parse_terms(const std::vector<std::string>& names) {
  std::vector<losses::Term> out;
  for (const std::string& n : names) {
    const std::optional<losses::Term> t = losses::parse_term(n);
    if (!t) throw ParameterError("unknown loss term '" + n + "'");
    out.push_back(*t);
  }
  return out;
}

}  // namespace

std::optional<metrics::ClipRange> parse_clip(const std::string& s) {
  if (s == "none") return std::nullopt;
  const std::size_t comma = s.find(',');
  if (comma == std::string::npos) throw ParameterError("clip must be 'min,max' or 'none', got '" + s + "'");
  metrics::ClipRange r;
  try {
    std::size_t used = 0;
    r.min = std::stod(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("trailing");
    const std::string hi = s.substr(comma + 1);
    r.max = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw ParameterError("clip must be 'min,max' or 'none', got '" + s + "'");
  }
  r.validate();
  return r;
}

void apply_config_text(const std::string& toml_text, RunConfig& cfg, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line << ", column " << e.source().begin.column;
    config_error(source, msg.str());
  }

  for (const auto& [section_key, section_node] : root) {
    const std::string section(section_key.str());
    const toml::table* table = section_node.as_table();
    if (!table) config_error(source, "top-level key '" + section + "' must be a table");
    for (const auto& [key_node, node] : *table) {
      const std::string key(key_node.str());
      const std::string where = source + ": [" + section + "] " + key;
      if (section == "eval") {
        if (key == "crop") cfg.eval.crop = metrics::CropSpec::parse(text(node, where));
        else if (key == "clip") {
          if (const toml::array* a = node.as_array()) {
            if (a->size() != 2) config_error(where, "expected [min, max]");
            metrics::ClipRange r{num(*a->get(0), where), num(*a->get(1), where)};
            r.validate();
            cfg.eval.clip = r;
          } else if (node.is_boolean()) {
            if (boolean(node, where)) cfg.eval.clip = metrics::ClipRange{};
            else cfg.eval.clip.reset();
          } else {
            cfg.eval.clip = parse_clip(text(node, where));
          }
        } else if (key == "presets") cfg.eval.presets = presets_from_names(strings(node, where));
        else if (key == "theta") cfg.eval.theta = num(node, where);
        else if (key == "gauss_sigma") cfg.eval.gauss_sigma = num(node, where);
        else if (key == "d_ref") cfg.eval.d_ref = num(node, where);
        else if (key == "degenerate_ratio") cfg.eval.degenerate_ratio = num(node, where);
        else if (key == "pixel_weighted") cfg.eval.pixel_weighted = boolean(node, where);
        else if (key == "method") cfg.method = text(node, where);
        else config_error(where, "unknown key");
      } else if (section == "canny") {
        if (key == "preset") cfg.eval.presets = presets_from_names(strings(node, where));
        else if (key == "sigma_low" || key == "sigma_high") {
          // handled together below
        } else if (key == "gauss_sigma") cfg.eval.gauss_sigma = num(node, where);
        else config_error(where, "unknown key");
      } else if (section == "losses") {
        if (key == "lambda_d") cfg.weights.lambda_d = num(node, where);
        else if (key == "lambda_c") cfg.weights.lambda_c = num(node, where);
        else if (key == "lambda_n") cfg.weights.lambda_n = num(node, where);
        else if (key == "mu") cfg.weights.mu = num(node, where);
        else if (key == "alpha") cfg.loss_options.attention.alpha = num(node, where);
        else if (key == "beta") cfg.loss_options.attention.beta = num(node, where);
        else if (key == "gamma") cfg.loss_options.attention.gamma = num(node, where);
        else if (key == "alpha_mode") cfg.loss_options.alpha_mode = parse_alpha_mode(text(node, where));
        else if (key == "contour_norm") cfg.loss_options.contour_norm = parse_contour_norm(text(node, where));
        else if (key == "convention") cfg.loss_options.convention = parse_convention(text(node, where));
        else if (key == "tol") cfg.tol = num(node, where);
        else if (key == "size") cfg.grad_size = static_cast<int>(integer(node, where));
        else if (key == "step") cfg.grad_step = num(node, where);
        else if (key == "terms") cfg.terms = parse_terms(strings(node, where));
        else config_error(where, "unknown key");
      } else if (section == "sweep") {
        if (key == "samples") cfg.samples = static_cast<int>(integer(node, where));
        else if (key == "seed") {
          const std::int64_t s = integer(node, where);
          if (s < 0) config_error(where, "seed must be >= 0");
          cfg.seed = static_cast<std::uint64_t>(s);
          cfg.seed_set = true;
        } else config_error(where, "unknown key");
      } else {
        config_error(source, "unknown section [" + section + "]");
      }
    }
  }

  if (const toml::table* canny = root["canny"].as_table()) {
    const toml::node* lo = canny->get("sigma_low");
    const toml::node* hi = canny->get("sigma_high");
    if ((lo == nullptr) != (hi == nullptr)) config_error(source, "[canny] needs both sigma_low and sigma_high");
    if (lo) {
      const double l = num(*lo, source + ": [canny] sigma_low"), h = num(*hi, source + ": [canny] sigma_high");
      cfg.eval.presets = {{edges::preset_label(l, h), l, h}};
    }
  }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(ss.str(), cfg, path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Flag values are applied after the config file, and only when given.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, const std::string& desc, std::function<void(const T&, RunConfig&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, desc);
    appliers_.push_back([opt, value, apply](RunConfig& cfg) {
      if (opt->count() > 0) apply(*value, cfg);
    });
    return opt;
  }

  CLI::Option* flag(const std::string& name, const std::string& desc, std::function<void(RunConfig&)> apply) {
    CLI::Option* opt = app_->add_flag(name, desc);
    appliers_.push_back([opt, apply](RunConfig& cfg) {
      if (opt->count() > 0) apply(cfg);
    });
    return opt;
  }

  void apply(RunConfig& cfg) const {
    for (const auto& f : appliers_) f(cfg);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct Subcommand {
  CLI::App* app;
  std::unique_ptr<FlagSet> flags;
  std::string config_path;
  std::vector<std::string> preset_names;
  std::optional<double> sigma_low, sigma_high;
};

void add_common(Subcommand& s) {
  FlagSet& f = *s.flags;
  f.add<std::string>("--out", "output directory", [](const std::string& v, RunConfig& c) { c.out = v; });
  s.app->add_option("--config", s.config_path, "TOML config file; flags override its values");
  f.add<int>("--jobs", "worker threads", [](const int& v, RunConfig& c) { c.jobs = v; });
  f.add<std::uint64_t>("--seed", "random seed", [](const std::uint64_t& v, RunConfig& c) {
    c.seed = v;
    c.seed_set = true;
  });
  f.flag("--no-timestamp", "omit the timestamp field for byte-identical reruns",
         [](RunConfig& c) { c.timestamp = false; });
}

void add_inputs(Subcommand& s, const std::string& gt_help) {
  FlagSet& f = *s.flags;
  f.add<std::string>("--pred", "prediction directory", [](const std::string& v, RunConfig& c) { c.pred_dir = v; });
  f.add<std::string>("--gt", gt_help, [](const std::string& v, RunConfig& c) { c.gt_dir = v; });
}

void add_canny(Subcommand& s) {
  FlagSet& f = *s.flags;
  s.app->add_option("--preset", s.preset_names, "named threshold pair(s), or 'all'");
  s.app->add_option("--sigma-low", s.sigma_low, "custom low threshold (fraction of max gradient)");
  s.app->add_option("--sigma-high", s.sigma_high, "custom high threshold (fraction of max gradient)");
  f.add<double>("--theta", "chamfer truncation radius in px", [](const double& v, RunConfig& c) { c.eval.theta = v; });
  f.add<double>("--gauss-sigma", "Canny smoothing in px",
                [](const double& v, RunConfig& c) { c.eval.gauss_sigma = v; });
  f.add<double>("--degenerate-ratio", "flag DBE when more than this fraction was truncated",
                [](const double& v, RunConfig& c) { c.eval.degenerate_ratio = v; });
}

void add_crop_clip(Subcommand& s) {
  FlagSet& f = *s.flags;
  f.add<std::string>("--crop", "none | eigen | x0,y0,x1,y1",
                     [](const std::string& v, RunConfig& c) { c.eval.crop = metrics::CropSpec::parse(v); });
  f.add<std::string>("--clip", "min,max in metres, or none",
                     [](const std::string& v, RunConfig& c) { c.eval.clip = parse_clip(v); });
}

void apply_presets(const Subcommand& s, RunConfig& cfg) {
  if (s.sigma_low.has_value() != s.sigma_high.has_value())
    throw ParameterError("--sigma-low and --sigma-high must be given together");
  std::vector<edges::SigmaPreset> presets;
  if (!s.preset_names.empty()) presets = presets_from_names(s.preset_names);
  if (s.sigma_low) presets.push_back({edges::preset_label(*s.sigma_low, *s.sigma_high), *s.sigma_low, *s.sigma_high});
  if (!presets.empty()) cfg.eval.presets = presets;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-edge evaluation and loss toolkit"};
  app.name("depthedge");
  app.require_subcommand(1);
  app.set_version_flag("--version", "depthedge 1.0");

  std::vector<std::unique_ptr<Subcommand>> subs;
  auto make = [&](const std::string& name, const std::string& desc) -> Subcommand& {
    auto s = std::make_unique<Subcommand>();
    s->app = app.add_subcommand(name, desc);
    s->flags = std::make_unique<FlagSet>(s->app);
    add_common(*s);
    subs.push_back(std::move(s));
    return *subs.back();
  };

  Subcommand& eval = make("eval", "evaluate predicted depth maps against ground truth");
  add_inputs(eval, "ground-truth directory (depth, optional .pbm contours)");
  eval.flags->add<std::string>("--annotations", "directory holding <id>.pbm contour annotations",
                               [](const std::string& v, RunConfig& c) { c.annotations_dir = v; });
  add_crop_clip(eval);
  add_canny(eval);
  eval.flags->add<double>("--d-ref", "reference plane for the directed depth error, m",
                          [](const double& v, RunConfig& c) { c.eval.d_ref = v; });
  eval.flags->flag("--pixel-weighted", "weight the aggregate by valid pixels",
                   [](RunConfig& c) { c.eval.pixel_weighted = true; });
  eval.flags->add<std::string>("--method", "row label in the summary table",
                               [](const std::string& v, RunConfig& c) { c.method = v; });

  Subcommand& dbe = make("dbe", "depth boundary error of predicted depth maps against contour annotations");
  add_inputs(dbe, "directory holding <id>.pbm contour annotations");
  add_canny(dbe);
  dbe.flags->add<std::string>("--clip", "min,max in metres, or none",
                              [](const std::string& v, RunConfig& c) { c.eval.clip = parse_clip(v); });

  Subcommand& sweep = make("sweep", "random Canny threshold sweep: DBE accuracy vs log RMSE");
  add_inputs(sweep, "ground-truth directory (depth and .pbm contours)");
  sweep.flags->add<std::string>("--annotations", "directory holding <id>.pbm contour annotations",
                                [](const std::string& v, RunConfig& c) { c.annotations_dir = v; });
  sweep.flags->add<int>("--samples", "number of threshold pairs", [](const int& v, RunConfig& c) { c.samples = v; });
  add_crop_clip(sweep);
  sweep.flags->add<double>("--theta", "chamfer truncation radius in px",
                           [](const double& v, RunConfig& c) { c.eval.theta = v; });
  sweep.flags->add<double>("--gauss-sigma", "Canny smoothing in px",
                           [](const double& v, RunConfig& c) { c.eval.gauss_sigma = v; });

  Subcommand& loss = make("losses", "per-term training loss breakdown");
  add_inputs(loss, "ground-truth directory (depth, .pbm contours, .normals.pfm)");
  {
    FlagSet& f = *loss.flags;
    f.add<double>("--lambda-d", "depth weight", [](const double& v, RunConfig& c) { c.weights.lambda_d = v; });
    f.add<double>("--lambda-c", "contour weight", [](const double& v, RunConfig& c) { c.weights.lambda_c = v; });
    f.add<double>("--lambda-n", "normals weight", [](const double& v, RunConfig& c) { c.weights.lambda_n = v; });
    f.add<double>("--mu", "depth/contour consensus weight", [](const double& v, RunConfig& c) { c.weights.mu = v; });
    f.add<double>("--beta", "attention base", [](const double& v, RunConfig& c) { c.loss_options.attention.beta = v; });
    f.add<double>("--gamma", "attention exponent",
                  [](const double& v, RunConfig& c) { c.loss_options.attention.gamma = v; });
    f.add<std::string>("--alpha-mode", "contour | non_contour", [](const std::string& v, RunConfig& c) {
      c.loss_options.alpha_mode = parse_alpha_mode(v);
    });
    f.add<std::string>("--contour-norm", "mean | l2", [](const std::string& v, RunConfig& c) {
      c.loss_options.contour_norm = parse_contour_norm(v);
    });
    f.add<std::string>("--convention", "camera | outward", [](const std::string& v, RunConfig& c) {
      c.loss_options.convention = parse_convention(v);
    });
  }

  Subcommand& grad = make("gradcheck", "compare analytic loss gradients with finite differences");
  {
    FlagSet& f = *grad.flags;
    f.add<double>("--tol", "maximum relative error", [](const double& v, RunConfig& c) { c.tol = v; });
    f.add<int>("--size", "side of the random inputs", [](const int& v, RunConfig& c) { c.grad_size = v; });
    f.add<double>("--step", "finite-difference step", [](const double& v, RunConfig& c) { c.grad_step = v; });
    f.add<std::vector<std::string>>("--term", "term(s) to check (default: all)",
                                    [](const std::vector<std::string>& v, RunConfig& c) { c.terms = parse_terms(v); });
  }

  Subcommand& synth = make("synth", "render synthetic scenes into gt/ and pred/ directories");
  synth.flags->add<std::string>("--spec", "scene description (JSON)",
                                [](const std::string& v, RunConfig& c) { c.spec_file = v; });

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    for (const auto& s : subs) {
      if (!s->app->parsed()) continue;
      RunConfig cfg;
      cfg.subcommand = s->app->get_name();
      if (!s->config_path.empty()) apply_config_file(s->config_path, cfg);
      s->flags->apply(cfg);
      apply_presets(*s, cfg);
      if (cfg.jobs < 1) throw ParameterError("--jobs must be >= 1");
      if (cfg.subcommand == "eval") return cmd_eval(cfg, out, err);
      if (cfg.subcommand == "dbe") return cmd_dbe(cfg, out, err);
      if (cfg.subcommand == "sweep") return cmd_sweep(cfg, out, err);
      if (cfg.subcommand == "losses") return cmd_losses(cfg, out, err);
      if (cfg.subcommand == "gradcheck") return cmd_gradcheck(cfg, out, err);
      if (cfg.subcommand == "synth") return cmd_synth(cfg, out, err);
    }
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace depthedge::cli
