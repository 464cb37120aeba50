// Command-line front end: argument parsing into a RunConfig and dispatch of
// one run to the library, producing a JSON report envelope
//   { "command", "inputs", "results", "diagnostics" }
// plus an exit status (0 success, 1 verification failed, 2 bad input).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selfsim/bl_metric.hpp"
#include "selfsim/cascade.hpp"
#include "selfsim/holder.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/measure_spec.hpp"
#include "selfsim/packing.hpp"
#include "selfsim/serialize.hpp"
#include "selfsim/spectrum.hpp"
#include "selfsim/svg.hpp"
#include "selfsim/verify.hpp"

namespace selfsim {

inline constexpr const char* kOutputDirEnv = "SELFSIM_OUTPUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitVerificationFailed = 1, kExitInputError = 2 };

/// Thrown by parse_config for --help; carries the help text.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string ifs_path;
  std::string measure_path;  // measure file or spec; "mu" for bl-dist
  std::string nu_path;       // bl-dist only
  std::string spec_path;     // build-measure only
  std::string q_text;
  std::string h_text;
  std::string levels_text;
  std::string radii_text;
  std::string point_text;
  std::optional<double> resolution;
  std::optional<double> s;
  double theta = 1.0;
  std::optional<double> target_h;  // cascade: theta = s / h
  double eps = 0.05;
  double tol = 0.05;
  int level = 8;  // J for verify-lemma
  int n = 16;
  int first = 2;
  int depth = 3;
  double growth = 2.0;
  std::size_t min_boxes = 2;
  std::size_t samples = 100;
  std::size_t nu_size = kDefaultReferenceSize;
  std::size_t support_cap = kDefaultSupportCap;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format;  // json | csv; empty: from the extension
  std::string svg_path;

  // Resolved values.
  std::vector<double> q_grid;
  std::vector<double> h_grid;
  std::optional<LevelWindow> window;
  std::vector<int> level_list;
  std::vector<double> radii;
  Point point;
};

// ---- value syntax ----

/// "a:b:n": n >= 2 equally spaced points from a to b inclusive.
inline std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw InputError(key + ": expected grid syntax a:b:n, got '" + text + "'");
  double a = 0.0;
  double b = 0.0;
  long n = 0;
  try {
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("a");
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("b");
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::logic_error&) {
    throw InputError(key + ": malformed grid '" + text + "' (expected a:b:n)");
  }
  if (n < 2) throw InputError(key + ": grid needs at least two points");
  if (!(a < b)) throw InputError(key + ": start < end required");
  return linear_grid(a, b, static_cast<std::size_t>(n));
}

/// "lo:hi" (inclusive integer range).
inline LevelWindow parse_window(const std::string& text, const std::string& key) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError(key + ": expected lo:hi, got '" + text + "'");
  try {
    std::size_t used = 0;
    const int lo = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("lo");
    const std::string rest = text.substr(colon + 1);
    const int hi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
    if (!(lo < hi)) throw InputError(key + ": start < end required");
    return {lo, hi};
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError(key + ": malformed level range '" + text + "'");
  }
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw InputError(key + ": not a number '" + part + "'");
    }
  }
  if (out.empty()) throw InputError(key + ": empty list");
  return out;
}

/// "b^-m1:m2" (b^-m for integer m from m1 to m2) or a comma-separated list.
inline std::vector<double> parse_radii(const std::string& text, const std::string& key) {
  const auto caret = text.find("^-");
  if (caret == std::string::npos) return parse_list(text, key);
  try {
    std::size_t used = 0;
    const std::string base_text = text.substr(0, caret);
    const double base = std::stod(base_text, &used);
    if (used != base_text.size() || !(base > 1.0)) throw std::invalid_argument("base");
    const auto window = parse_window(text.substr(caret + 2), key);
    std::vector<double> out;
    for (int m = window.lo; m <= window.hi; ++m) out.push_back(std::pow(base, -m));
    return out;
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError(key + ": expected b^-m1:m2 with b > 1, got '" + text + "'");
  }
}

// ---- parsing ----

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dim",  "cutset",  "build-measure", "bl-dist", "tau",
                                              "legendre", "coarse", "holder", "boxdim", "cascade",
                                              "cascade-check", "verify-lemma", "verify-formalism"};
  return names;
}

/// Parses `args` (without the program name) into a validated config.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Multifractal analysis of self-similar measures", "selfsim"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");  // -h would clash with --h

  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str(); };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "write the result to this file");
    sub->add_option("--format", cfg.format, "json or csv (default: from --out extension)")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_measure = [&](CLI::App* sub) {
    sub->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)");
    sub->add_option("--measure", cfg.measure_path, "measure file (CSV/JSON atoms or a JSON measure spec)");
    sub->add_option("--resolution", cfg.resolution, "cut-set resolution R for the default natural measure");
  };

  auto* dim = app.add_subcommand("dim", "similarity dimension of an IFS");
  dim->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)")->required();

  auto* cutset = app.add_subcommand("cutset", "enumerate the cut set I(R)");
  cutset->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)")->required();
  cutset->add_option("--resolution", cfg.resolution, "R in (0,1]")->required();
  add_output(cutset);

  auto* build = app.add_subcommand("build-measure", "build a measure from a JSON spec");
  build->add_option("--spec", cfg.spec_path, "measure spec (JSON)")->required();
  build->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)");
  add_seed(build);
  add_output(build);

  auto* bl = app.add_subcommand("bl-dist", "bounded-Lipschitz distance between two measures");
  bl->add_option("--mu", cfg.measure_path, "first measure")->required();
  bl->add_option("--nu", cfg.nu_path, "second measure")->required();
  bl->add_option("--ifs", cfg.ifs_path, "IFS for spec-built measures");
  bl->add_option("--cap", cfg.support_cap, "combined support cap")->capture_default_str();
  add_seed(bl);
  add_output(bl);

  auto* tau = app.add_subcommand("tau", "L^q spectrum estimate");
  add_measure(tau);
  tau->add_option("--q", cfg.q_text, "q grid a:b:n")->required();
  tau->add_option("--levels", cfg.levels_text, "dyadic levels lo:hi")->required();
  add_seed(tau);
  add_output(tau);
  tau->add_option("--svg", cfg.svg_path, "write an SVG plot");

  auto* legendre = app.add_subcommand("legendre", "Legendre transform of the L^q spectrum");
  add_measure(legendre);
  legendre->add_option("--q", cfg.q_text, "q grid a:b:n")->required();
  legendre->add_option("--h", cfg.h_text, "h grid a:b:n")->required();
  legendre->add_option("--levels", cfg.levels_text, "dyadic levels lo:hi")->required();
  add_seed(legendre);
  add_output(legendre);
  legendre->add_option("--svg", cfg.svg_path, "write an SVG plot");

  auto* coarse = app.add_subcommand("coarse", "coarse multifractal spectrum");
  add_measure(coarse);
  coarse->add_option("--h", cfg.h_text, "h bins a:b:n")->required();
  coarse->add_option("--levels", cfg.levels_text, "dyadic levels lo:hi")->required();
  coarse->add_option("--eps", cfg.eps, "bin half-width")->capture_default_str();
  coarse->add_option("--min-boxes", cfg.min_boxes, "boxes needed for a bin value")->capture_default_str();
  add_seed(coarse);
  add_output(coarse);
  coarse->add_option("--svg", cfg.svg_path, "write an SVG plot");

  auto* holder = app.add_subcommand("holder", "local Hölder exponent at a point");
  add_measure(holder);
  holder->add_option("--x", cfg.point_text, "point, comma-separated coordinates")->required();
  holder->add_option("--radii", cfg.radii_text, "radii: b^-m1:m2 or a comma list")->required();
  holder->add_option("--s", cfg.s, "also report the lower s-density");
  add_seed(holder);
  add_output(holder);

  auto* boxdim = app.add_subcommand("boxdim", "packing-based upper box dimension");
  boxdim->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)")->required();
  boxdim->add_option("--radii", cfg.radii_text, "radii: b^-m1:m2 or a comma list")->required();
  boxdim->add_option("--resolution", cfg.resolution, "attractor sample resolution");
  add_output(boxdim);

  for (auto* sub : {app.add_subcommand("cascade", "build a cascade ball tree"),
                    app.add_subcommand("cascade-check", "mass exponents of a cascade")}) {
    sub->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)")->required();
    auto* theta = sub->add_option("--theta", cfg.theta, "theta >= 1")->capture_default_str();
    sub->add_option("--h", cfg.target_h, "target exponent h in (0, s]; sets theta = s/h")->excludes(theta);
    sub->add_option("--levels", cfg.levels_text, "explicit level schedule J1,J2,...");
    sub->add_option("--first", cfg.first, "J1 of the geometric schedule")->capture_default_str();
    sub->add_option("--depth", cfg.depth, "number of levels")->capture_default_str();
    sub->add_option("--growth", cfg.growth, "geometric growth factor")->capture_default_str();
    add_seed(sub);
    add_output(sub);
    if (sub->get_name() == "cascade-check") {
      sub->add_option("--samples", cfg.samples, "random balls")->capture_default_str();
    }
  }

  auto* lemma = app.add_subcommand("verify-lemma", "ball-mass lower bound on typical approximants");
  lemma->add_option("--ifs", cfg.ifs_path, "IFS specification (JSON)")->required();
  lemma->add_option("--theta", cfg.theta, "theta >= 1")->capture_default_str();
  lemma->add_option("--J", cfg.level, "cut-set level J")->capture_default_str();
  lemma->add_option("--n", cfg.n, "approximant index n >= J")->capture_default_str();
  auto* lemma_eps = lemma->add_option("--eps", cfg.eps, "exponent slack")->default_str("0.1");
  lemma->add_option("--nu-size", cfg.nu_size, "atoms of the seeded reference measure")->capture_default_str();
  add_seed(lemma);
  add_output(lemma);

  auto* formalism = app.add_subcommand("verify-formalism", "tau(q) = s(q-1) and d(h) = h at finite scale");
  add_measure(formalism);
  formalism->add_option("--q", cfg.q_text, "q grid on [0,1]")->default_str("0:1:11");
  formalism->add_option("--h", cfg.h_text, "h grid (default 0.1s:s:10)");
  formalism->add_option("--levels", cfg.levels_text, "dyadic levels lo:hi")->default_str("6:12");
  formalism->add_option("--tol", cfg.tol, "tolerance for tau and Legendre errors")->capture_default_str();
  formalism->add_option("--s", cfg.s, "dimension (default: from the IFS)");
  add_seed(formalism);
  add_output(formalism);

  std::vector<std::string> storage{"selfsim"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw InputError(e.what());
  }
  cfg.command = app.get_subcommands().front()->get_name();

  // Per-command defaults; the fields are shared, so they cannot live on the options.
  if (cfg.command == "verify-lemma" && lemma_eps->count() == 0) cfg.eps = 0.1;
  if (cfg.command == "verify-formalism") {
    if (cfg.q_text.empty()) cfg.q_text = "0:1:11";
    if (cfg.levels_text.empty()) cfg.levels_text = "6:12";
  }

  // Resolve value syntax.
  const auto& c = cfg.command;
  if (!cfg.q_text.empty()) cfg.q_grid = parse_grid(cfg.q_text, "--q");
  if (!cfg.h_text.empty()) cfg.h_grid = parse_grid(cfg.h_text, "--h");
  if (!cfg.radii_text.empty()) cfg.radii = parse_radii(cfg.radii_text, "--radii");
  if (!cfg.point_text.empty()) cfg.point = parse_list(cfg.point_text, "--x");
  if (!cfg.levels_text.empty()) {
    if (c == "cascade" || c == "cascade-check") {
      for (double v : parse_list(cfg.levels_text, "--levels")) {
        if (v != std::floor(v)) throw InputError("--levels: levels must be integers");
        cfg.level_list.push_back(static_cast<int>(v));
      }
    } else {
      cfg.window = parse_window(cfg.levels_text, "--levels");
    }
  }
  const bool measure_command =
      c == "tau" || c == "legendre" || c == "coarse" || c == "holder" || c == "verify-formalism";
  if (measure_command && cfg.ifs_path.empty() && cfg.measure_path.empty()) {
    throw InputError(c + ": --ifs is required (or give --measure)");
  }
  if (cfg.resolution && !(*cfg.resolution > 0.0 && *cfg.resolution <= 1.0)) {
    throw InputError("--resolution: must lie in (0,1]");
  }
  if (c == "verify-formalism" && cfg.ifs_path.empty() && !cfg.s) {
    throw InputError("verify-formalism: --s is required when no --ifs is given");
  }
  return cfg;
}

// ---- running ----

struct RunResult {
  Json report;
  int exit_code = kExitOk;
};

namespace detail {

inline Json config_inputs(const RunConfig& cfg) {
  Json j;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  put("ifs", cfg.ifs_path);
  put("measure", cfg.measure_path);
  put("nu", cfg.nu_path);
  put("spec", cfg.spec_path);
  if (!cfg.q_grid.empty()) j["q_grid"] = cfg.q_grid;
  if (!cfg.h_grid.empty()) j["h_grid"] = cfg.h_grid;
  if (cfg.window) j["levels"] = {cfg.window->lo, cfg.window->hi};
  if (!cfg.level_list.empty()) j["levels"] = cfg.level_list;
  if (!cfg.radii.empty()) j["radii"] = cfg.radii;
  if (!cfg.point.empty()) j["x"] = cfg.point;
  if (cfg.resolution) j["resolution"] = *cfg.resolution;
  if (cfg.s) j["s"] = *cfg.s;
  const auto& c = cfg.command;
  if (c == "cascade" || c == "cascade-check" || c == "verify-lemma") j["theta"] = cfg.theta;
  if (cfg.target_h) j["h"] = *cfg.target_h;
  if (c == "cascade" || c == "cascade-check") {
    if (cfg.level_list.empty()) {
      j["first"] = cfg.first;
      j["depth"] = cfg.depth;
      j["growth"] = cfg.growth;
    }
    if (c == "cascade-check") j["samples"] = cfg.samples;
  }
  if (c == "coarse") {
    j["eps"] = cfg.eps;
    j["min_boxes"] = cfg.min_boxes;
  }
  if (c == "verify-lemma") {
    j["J"] = cfg.level;
    j["n"] = cfg.n;
    j["eps"] = cfg.eps;
    j["nu_size"] = cfg.nu_size;
  }
  if (c == "verify-formalism") j["tol"] = cfg.tol;
  if (c == "bl-dist") j["support_cap"] = cfg.support_cap;
  j["seed"] = cfg.seed;
  return j;
}

inline Json normalization_json(const AffineNormalization& n) {
  return {{"identity", n.is_identity()}, {"offset", n.offset}, {"scale", n.scale}};
}

inline Json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"count", f.count}};
}

inline std::string resolve_output_path(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv(kOutputDirEnv);
  std::filesystem::path p(path);
  if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p.string();
}

inline bool wants_csv(const RunConfig& cfg) {
  if (!cfg.format.empty()) return cfg.format == "csv";
  return std::filesystem::path(cfg.out_path).extension() == ".csv";
}

inline void write_measure(const RunConfig& cfg, const AtomicMeasure& mu) {
  if (cfg.out_path.empty()) return;
  const auto path = resolve_output_path(cfg.out_path);
  write_text_file(path, wants_csv(cfg) ? measure_to_csv(mu) : measure_to_json(mu).dump(1) + "\n");
}

inline void write_curve(const RunConfig& cfg, const SpectrumCurve& curve) {
  if (!cfg.out_path.empty()) {
    const auto path = resolve_output_path(cfg.out_path);
    write_text_file(path, wants_csv(cfg) ? curve_to_csv(curve) : curve_to_json(curve).dump(2) + "\n");
  }
  if (!cfg.svg_path.empty()) write_text_file(resolve_output_path(cfg.svg_path), curve_to_svg(curve, cfg.command));
}

/// Loaded and normalized inputs shared by the measure commands.
struct Inputs {
  std::optional<NormalizedIfs> ifs;
  std::optional<AtomicMeasure> measure;
  Json measure_info;
  double s = 0.0;
};

inline Inputs load_inputs(const RunConfig& cfg, Json& diagnostics, std::optional<double> default_resolution) {
  Inputs in;
  if (!cfg.ifs_path.empty()) {
    in.ifs = normalize_to_unit_cube(load_ifs(cfg.ifs_path));
    in.s = similarity_dimension(in.ifs->ifs);
    diagnostics["normalization"] = normalization_json(in.ifs->map);
    diagnostics["declared_osc"] = in.ifs->ifs.declared_osc();
  }
  if (cfg.s) in.s = *cfg.s;
  MeasureContext ctx{in.ifs ? &in.ifs->ifs : nullptr, cfg.seed, {}};
  if (!cfg.measure_path.empty()) {
    in.measure = load_measure(cfg.measure_path, ctx, &in.measure_info);
  } else if (in.ifs && default_resolution) {
    const double r = cfg.resolution.value_or(*default_resolution);
    in.measure = natural_measure(in.ifs->ifs, r);
    in.measure_info = {{"kind", "natural"}, {"resolution", r}};
  }
  if (in.measure) {
    in.measure_info["atoms"] = in.measure->size();
    diagnostics["measure"] = in.measure_info;
  }
  return in;
}

inline double window_resolution(const LevelWindow& w) { return std::exp2(-static_cast<double>(w.hi + 3)); }

inline Json words_json(const CutSet& cut, const IfsSystem& ifs) {
  Json words = Json::array();
  const Point base = default_base(ifs);
  for (const auto& w : cut.words) {
    words.push_back({{"word", w.to_string()}, {"ratio", w.ratio}, {"anchor", anchor_point(ifs, w, base)}});
  }
  return words;
}

inline double cascade_theta(const RunConfig& cfg, double s) {
  if (!cfg.target_h) return cfg.theta;
  if (!(*cfg.target_h > 0.0 && *cfg.target_h <= s)) {
    throw InputError("--h: must lie in (0, s] with s = " + format_double(s));
  }
  return s / *cfg.target_h;
}

inline std::vector<int> cascade_levels(const RunConfig& cfg, double theta) {
  if (!cfg.level_list.empty()) return cfg.level_list;
  if (cfg.depth < 1) throw InputError("--depth must be >= 1");
  return geometric_level_schedule(cfg.first, theta, static_cast<std::size_t>(cfg.depth), cfg.growth);
}

inline Json cascade_json(const CascadeTree& tree) {
  Json levels = Json::array();
  for (const auto& f : tree.families) {
    CompensatedSum mass;
    for (const auto& b : f.balls) mass.add(b.mass());
    const auto [cmin, cmax] = std::minmax_element(f.child_counts.begin(), f.child_counts.end());
    const auto [pmin, pmax] = std::minmax_element(f.candidate_pool_sizes.begin(), f.candidate_pool_sizes.end());
    levels.push_back({{"level", f.level},
                      {"J", f.resolution_exponent},
                      {"radius", f.radius},
                      {"separation_radius", f.separation_radius},
                      {"gather_radius", f.gather_radius},
                      {"balls", f.balls.size()},
                      {"total_mass", mass.value()},
                      {"children_min", *cmin},
                      {"children_max", *cmax},
                      {"pool_min", *pmin},
                      {"pool_max", *pmax},
                      {"growth_condition", f.growth_condition}});
  }
  return {{"theta", tree.theta}, {"levels", tree.levels}, {"diameter", tree.diameter}, {"families", levels}};
}

}  // namespace detail

/// Executes one configured command.
inline RunResult run(const RunConfig& cfg) {
  RunResult result;
  Json results = Json::object();
  Json diagnostics = Json::object();
  const auto& c = cfg.command;

  if (c == "dim") {
    const auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    results["s"] = in.s;
    results["p"] = in.ifs->ifs.size();
    results["ratios"] = in.ifs->ifs.ratios();
    results["name"] = in.ifs->ifs.name();
  } else if (c == "cutset") {
    const auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    const IfsSystem& ifs = in.ifs->ifs;
    const CutSet cut = cut_set(ifs, *cfg.resolution);
    CompensatedSum unity;
    for (const auto& w : cut.words) unity.add(std::exp(in.s * w.log_ratio));
    results["resolution"] = *cfg.resolution;
    results["size"] = cut.size();
    results["max_length"] = cut.max_length();
    results["partition_of_unity"] = unity.value();
    results["words"] = detail::words_json(cut, ifs);
    if (!cfg.out_path.empty()) {
      const auto path = detail::resolve_output_path(cfg.out_path);
      if (detail::wants_csv(cfg)) {
        std::string csv = "word,ratio";
        for (std::size_t k = 0; k < ifs.dimension(); ++k) csv += ",x" + std::to_string(k + 1);
        csv += "\n";
        const Point base = default_base(ifs);
        for (const auto& w : cut.words) {
          csv += w.to_string() + "," + format_double(w.ratio);
          for (double v : anchor_point(ifs, w, base)) csv += "," + format_double(v);
          csv += "\n";
        }
        write_text_file(path, csv);
      } else {
        write_text_file(path, results["words"].dump(1) + "\n");
      }
    }
  } else if (c == "build-measure") {
    auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    MeasureContext ctx{in.ifs ? &in.ifs->ifs : nullptr, cfg.seed, {}};
    Json info;
    const AtomicMeasure mu = load_measure(cfg.spec_path, ctx, &info);
    results["atoms"] = mu.size();
    results["total_mass"] = mu.total_mass();
    results["spec"] = info;
    if (cfg.out_path.empty()) results["measure"] = measure_to_json(mu);
    detail::write_measure(cfg, mu);
  } else if (c == "bl-dist") {
    auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);  // loads --mu as the measure
    diagnostics.erase("measure");
    MeasureContext ctx{in.ifs ? &in.ifs->ifs : nullptr, cfg.seed, {}};
    const Json mu_info = in.measure_info;
    Json nu_info;
    const AtomicMeasure& mu = *in.measure;
    const AtomicMeasure nu = load_measure(cfg.nu_path, ctx, &nu_info);
    nu_info["atoms"] = nu.size();
    const BlDistance d = bl_distance(mu, nu, cfg.support_cap);
    Json witness = Json::array();
    for (std::size_t k = 0; k < d.witness.size(); ++k) {
      Json row = Json::array();
      for (double v : d.witness.point(k)) row.push_back(v);
      row.push_back(d.witness.values[k]);
      witness.push_back(row);
    }
    results["distance"] = d.value;
    results["witness_value"] = d.witness_value;
    results["support_size"] = d.witness.size();
    diagnostics["mu"] = mu_info;
    diagnostics["nu"] = nu_info;
    diagnostics["witness_max_violation"] = d.witness.max_violation();
    result.report["distance"] = d.value;
    result.report["witness"] = witness;
    if (!cfg.out_path.empty()) {
      write_text_file(detail::resolve_output_path(cfg.out_path),
                      Json{{"distance", d.value}, {"witness", witness}}.dump(1) + "\n");
    }
  } else if (c == "tau" || c == "legendre") {
    auto in = detail::load_inputs(cfg, diagnostics, detail::window_resolution(*cfg.window));
    const SpectrumCurve tau = tau_estimate(*in.measure, *cfg.window, cfg.q_grid);
    if (!tau.notes.empty()) diagnostics["notes"] = tau.notes;
    if (c == "tau") {
      results["tau"] = curve_to_json(tau);
      detail::write_curve(cfg, tau);
    } else {
      const SpectrumCurve leg = legendre_transform(tau, cfg.h_grid);
      results["tau"] = curve_to_json(tau);
      results["legendre"] = curve_to_json(leg);
      detail::write_curve(cfg, leg);
    }
  } else if (c == "coarse") {
    auto in = detail::load_inputs(cfg, diagnostics, detail::window_resolution(*cfg.window));
    const SpectrumCurve curve = coarse_spectrum(*in.measure, *cfg.window, cfg.h_grid, {cfg.eps, cfg.min_boxes});
    results["coarse"] = curve_to_json(curve);
    detail::write_curve(cfg, curve);
  } else if (c == "holder") {
    const double finest = cfg.radii.empty() ? 1.0 : *std::min_element(cfg.radii.begin(), cfg.radii.end());
    auto in = detail::load_inputs(cfg, diagnostics, finest / 16.0);
    Point x = cfg.point;
    if (in.ifs && cfg.measure_path.empty()) x = in.ifs->map.forward(cfg.point);
    const HolderEstimate est = local_holder(*in.measure, x, cfg.radii);
    results["x"] = x;
    results["slope"] = est.slope;
    results["min_chord"] = est.min_chord;
    results["fit"] = detail::fit_json(est.fit);
    results["radii"] = est.radii;
    results["masses"] = est.masses;
    if (cfg.s) results["lower_density"] = lower_density(*in.measure, x, *cfg.s, cfg.radii).value;
    if (!cfg.out_path.empty()) write_text_file(detail::resolve_output_path(cfg.out_path), results.dump(2) + "\n");
  } else if (c == "boxdim") {
    const auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    const auto est = upper_box_dimension(in.ifs->ifs, cfg.radii, cfg.resolution);
    results["estimate"] = est.estimate;
    results["fit"] = detail::fit_json(est.fit);
    results["radii"] = est.radii;
    results["counts"] = est.counts;
    diagnostics["sample_resolution"] = est.sample_resolution;
    diagnostics["sample_size"] = est.sample_size;
    if (!cfg.out_path.empty()) write_text_file(detail::resolve_output_path(cfg.out_path), results.dump(2) + "\n");
  } else if (c == "cascade" || c == "cascade-check") {
    const auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    const double theta = detail::cascade_theta(cfg, in.s);
    if (cfg.target_h) diagnostics["theta_from_h"] = theta;
    const auto levels = detail::cascade_levels(cfg, theta);
    const CascadeTree tree = build_cascade(in.ifs->ifs, theta, levels, levels.size());
    results["tree"] = detail::cascade_json(tree);
    if (c == "cascade") {
      detail::write_measure(cfg, cascade_to_atomic(tree, tree.depth()));
    } else {
      const auto rep = cascade_scaling_check(tree, in.s, cfg.seed, cfg.samples);
      Json lv = Json::array();
      for (const auto& st : rep.levels) {
        lv.push_back({{"level", st.level},
                      {"J", st.exponent},
                      {"cells", st.cells},
                      {"min_exponent", st.min_exponent},
                      {"max_exponent", st.max_exponent},
                      {"max_deviation", st.max_deviation},
                      {"window", {st.window_lo, st.window_hi}},
                      {"inside_window", st.inside_window},
                      {"window_holds", st.window_holds},
                      {"growth_condition", st.growth_condition}});
      }
      results["s"] = rep.s;
      results["levels"] = lv;
      results["ball_exponent"] = rep.ball_exponent;
      results["ball_samples"] = rep.ball_samples;
      if (rep.empirical_constant) results["empirical_constant"] = *rep.empirical_constant;
      if (!rep.notes.empty()) diagnostics["notes"] = rep.notes;
      if (!cfg.out_path.empty()) write_text_file(detail::resolve_output_path(cfg.out_path), results.dump(2) + "\n");
    }
  } else if (c == "verify-lemma") {
    const auto in = detail::load_inputs(cfg, diagnostics, std::nullopt);
    const IfsSystem& ifs = in.ifs->ifs;
    const AtomicMeasure nu = random_reference_measure(ifs, cfg.nu_size, cfg.seed);
    const auto pm = typical_approximant(ifs, cfg.n, cfg.level, nu);
    const CutSet cut = cut_set(ifs, std::exp2(-static_cast<double>(cfg.level)));
    double min_weight = 1.0;
    for (const auto& w : cut.words) min_weight = std::min(min_weight, std::exp(in.s * w.log_ratio));
    const double beta = pm.schedule.at("beta_n");
    const double bound = beta * min_weight * std::exp2(in.s * (1.0 + cfg.eps) * cfg.level);
    const auto rep = verify_majholdmu(pm.measure, ifs, cfg.theta, cfg.level, in.s, cfg.eps,
                                      std::exp2(-static_cast<double>(cfg.level)), bound);
    results["anchors"] = rep.anchors;
    results["radius"] = rep.radius;
    results["min_mass"] = rep.min_mass;
    results["empirical_constant"] = rep.min_ratio;
    results["argmin_word"] = rep.argmin_word;
    results["bound"] = bound;
    results["beta_n"] = beta;
    results["positive"] = rep.positive;
    results["passed"] = rep.passed;
    diagnostics["measure"] = {{"kind", "typical"}, {"atoms", pm.measure.size()}, {"nu_atoms", nu.size()}};
    if (!rep.passed) result.exit_code = kExitVerificationFailed;
    if (!cfg.out_path.empty()) write_text_file(detail::resolve_output_path(cfg.out_path), results.dump(2) + "\n");
  } else if (c == "verify-formalism") {
    auto in = detail::load_inputs(cfg, diagnostics, detail::window_resolution(*cfg.window));
    const std::vector<double> h_grid = cfg.h_grid.empty() ? linear_grid(0.1 * in.s, in.s, 10) : cfg.h_grid;
    const auto rep = verify_formalism(*in.measure, in.s, cfg.q_grid, h_grid, *cfg.window, cfg.tol);
    results["s"] = rep.s;
    results["tau_error"] = rep.tau_error;
    results["legendre_error"] = rep.legendre_error;
    results["concavity_checks"] = rep.concavity_checks;
    results["concavity_violations"] = rep.concavity_violations.size();
    results["concavity_holds"] = rep.concavity_holds;
    results["tol"] = rep.tol;
    results["passed"] = rep.passed && rep.concavity_holds;
    results["tau"] = curve_to_json(rep.tau);
    results["legendre"] = curve_to_json(rep.legendre);
    if (!rep.tau.notes.empty()) diagnostics["notes"] = rep.tau.notes;
    if (!(rep.passed && rep.concavity_holds)) result.exit_code = kExitVerificationFailed;
    if (!cfg.out_path.empty()) write_text_file(detail::resolve_output_path(cfg.out_path), results.dump(2) + "\n");
  } else {
    throw InputError("unknown command '" + c + "'");
  }

  Json report;
  report["command"] = c;
  report["inputs"] = detail::config_inputs(cfg);
  report["results"] = results;
  report["diagnostics"] = diagnostics;
  for (auto& [k, v] : result.report.items()) report[k] = v;
  result.report = std::move(report);
  return result;
}

}  // namespace selfsim
