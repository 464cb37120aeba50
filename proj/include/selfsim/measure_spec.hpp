// Measure specifications: JSON objects naming a construction ("natural",
// "typical", ...) and its parameters, or plain atom data on disk.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "selfsim/cascade.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/schedule.hpp"
#include "selfsim/serialize.hpp"

namespace selfsim {

struct MeasureContext {
  const IfsSystem* ifs = nullptr;  // needed by every kind except "atomic"
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;  // for relative "file" entries
};

inline constexpr std::size_t kDefaultReferenceSize = 16;
inline constexpr std::size_t kDefaultReferenceDepth = 8;

namespace detail {

inline const IfsSystem& require_ifs(const MeasureContext& ctx, const std::string& kind) {
  if (!ctx.ifs) throw InputError("measure kind '" + kind + "' needs an IFS (pass --ifs)");
  return *ctx.ifs;
}

inline double spec_number(const Json& spec, const char* key, const std::string& kind) {
  if (!spec.contains(key)) throw InputError("measure '" + kind + "': missing '" + key + "'");
  return json_number(spec[key], "measure '" + kind + "'." + key);
}

inline int spec_int(const Json& spec, const char* key, const std::string& kind) {
  if (!spec.contains(key) || !spec[key].is_number_integer()) {
    throw InputError("measure '" + kind + "': '" + key + "' must be an integer");
  }
  return spec[key].get<int>();
}

inline Json schedule_json(const Schedule& s) {
  Json j;
  j["schedule"] = to_string(s.kind);
  j["n"] = s.n;
  for (const auto& [k, v] : s.values) j[k] = v;
  return j;
}

}  // namespace detail

AtomicMeasure build_measure(const Json& spec, const MeasureContext& ctx, Json* info = nullptr);
AtomicMeasure load_measure(const std::string& path, const MeasureContext& ctx, Json* info = nullptr);

namespace detail {

inline AtomicMeasure reference_measure(const Json& spec, const MeasureContext& ctx, std::uint64_t seed, Json* info) {
  if (spec.contains("nu")) {
    MeasureContext inner = ctx;
    inner.seed = seed;
    return build_measure(spec["nu"], inner, info);
  }
  const IfsSystem& ifs = require_ifs(ctx, "random");
  if (info) *info = {{"kind", "random"}, {"size", kDefaultReferenceSize}, {"depth", kDefaultReferenceDepth}, {"seed", seed}};
  return random_reference_measure(ifs, kDefaultReferenceSize, seed, kDefaultReferenceDepth);
}

}  // namespace detail

/// Builds the measure described by `spec`. `info` receives the resolved
/// parameters (schedules, sizes) for the report.
inline AtomicMeasure build_measure(const Json& spec, const MeasureContext& ctx, Json* info) {
  if (spec.is_array()) return measure_from_json(spec);
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
    throw InputError("measure spec: expected an object with a string 'kind'");
  }
  const std::string kind = spec["kind"].get<std::string>();
  std::uint64_t seed = ctx.seed;
  if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned()) throw InputError("measure '" + kind + "': 'seed' must be a non-negative integer");
    seed = spec["seed"].get<std::uint64_t>();
  }
  Json local;
  Json& out = info ? *info : local;
  out = Json::object();
  out["kind"] = kind;

  if (kind == "atomic") {
    reject_unknown_keys(spec, {"kind", "atoms", "file", "seed"}, "measure 'atomic'");
    if (spec.contains("atoms") == spec.contains("file")) throw InputError("measure 'atomic': give exactly one of 'atoms' or 'file'");
    if (spec.contains("atoms")) return measure_from_json(spec["atoms"], "measure 'atomic'.atoms");
    const auto path = (ctx.base_dir / spec["file"].get<std::string>()).string();
    out["file"] = spec["file"];
    return load_measure(path, ctx);
  }
  if (kind == "natural") {
    reject_unknown_keys(spec, {"kind", "resolution", "seed"}, "measure 'natural'");
    const double r = detail::spec_number(spec, "resolution", kind);
    out["resolution"] = r;
    return natural_measure(detail::require_ifs(ctx, kind), r);
  }
  if (kind == "random") {
    reject_unknown_keys(spec, {"kind", "size", "depth", "seed"}, "measure 'random'");
    const int size = detail::spec_int(spec, "size", kind);
    const int depth = spec.contains("depth") ? detail::spec_int(spec, "depth", kind) : int(kDefaultReferenceDepth);
    if (size < 1 || depth < 0) throw InputError("measure 'random': need size >= 1 and depth >= 0");
    out["size"] = size;
    out["depth"] = depth;
    out["seed"] = seed;
    return random_reference_measure(detail::require_ifs(ctx, kind), static_cast<std::size_t>(size), seed,
                                    static_cast<std::size_t>(depth));
  }
  if (kind == "dirac_mix") {
    reject_unknown_keys(spec, {"kind", "a", "d_n", "alpha_n", "theta", "n", "nu", "seed"}, "measure 'dirac_mix'");
    const IfsSystem& ifs = detail::require_ifs(ctx, kind);
    if (!spec.contains("a")) throw InputError("measure 'dirac_mix': missing 'a'");
    const auto a = detail::json_vector(spec["a"], "measure 'dirac_mix'.a");
    const double theta = detail::spec_number(spec, "theta", kind);
    const int n = spec.contains("n") ? detail::spec_int(spec, "n", kind) : 1;
    if (spec.contains("d_n") == spec.contains("alpha_n")) {
      throw InputError("measure 'dirac_mix': give exactly one of 'd_n' (Dirac schedule) or 'alpha_n' (density schedule)");
    }
    const double s = similarity_dimension(ifs);
    const Schedule sched = spec.contains("d_n") ? Schedule::dirac(n, detail::spec_number(spec, "d_n", kind), theta, s)
                                                : Schedule::density(n, detail::spec_number(spec, "alpha_n", kind), theta, s);
    Json nu_info;
    const AtomicMeasure nu = detail::reference_measure(spec, ctx, seed, &nu_info);
    const auto pm = dirac_perturbation(a, nu, sched);
    out["schedule"] = detail::schedule_json(sched);
    out["nu"] = nu_info;
    return pm.measure;
  }
  if (kind == "packing_mix") {
    reject_unknown_keys(spec, {"kind", "n", "nu", "seed"}, "measure 'packing_mix'");
    const IfsSystem& ifs = detail::require_ifs(ctx, kind);
    const int n = detail::spec_int(spec, "n", kind);
    Json nu_info;
    const AtomicMeasure nu = detail::reference_measure(spec, ctx, seed, &nu_info);
    const auto pm = packing_mixture(ifs, n, nu, similarity_dimension(ifs));
    out["schedule"] = detail::schedule_json(pm.schedule);
    out["packing_centers"] = pm.pieces;
    out["nu"] = nu_info;
    return pm.measure;
  }
  if (kind == "typical") {
    reject_unknown_keys(spec, {"kind", "n", "J", "nu", "seed"}, "measure 'typical'");
    const IfsSystem& ifs = detail::require_ifs(ctx, kind);
    const int n = detail::spec_int(spec, "n", kind);
    const int level = detail::spec_int(spec, "J", kind);
    Json nu_info;
    const AtomicMeasure nu = detail::reference_measure(spec, ctx, seed, &nu_info);
    const auto pm = typical_approximant(ifs, n, level, nu);
    out["schedule"] = detail::schedule_json(pm.schedule);
    out["lambda_atoms"] = pm.pieces;
    out["nu"] = nu_info;
    return pm.measure;
  }
  if (kind == "cascade") {
    reject_unknown_keys(spec, {"kind", "theta", "levels", "first", "depth", "level", "seed"}, "measure 'cascade'");
    const IfsSystem& ifs = detail::require_ifs(ctx, kind);
    const double theta = detail::spec_number(spec, "theta", kind);
    std::vector<int> levels;
    if (spec.contains("levels")) {
      for (const auto& v : spec["levels"]) {
        if (!v.is_number_integer()) throw InputError("measure 'cascade'.levels must be integers");
        levels.push_back(v.get<int>());
      }
    } else {
      levels = geometric_level_schedule(detail::spec_int(spec, "first", kind), theta,
                                        static_cast<std::size_t>(detail::spec_int(spec, "depth", kind)));
    }
    if (levels.empty()) throw InputError("measure 'cascade': empty level schedule");
    const auto tree = build_cascade(ifs, theta, levels, levels.size());
    const int level = spec.contains("level") ? detail::spec_int(spec, "level", kind) : int(levels.size());
    if (level < 1) throw InputError("measure 'cascade': level must be >= 1");
    out["theta"] = theta;
    out["levels"] = levels;
    out["level"] = level;
    return cascade_to_atomic(tree, static_cast<std::size_t>(level));
  }
  throw InputError("measure spec: unknown kind '" + kind + "'");
}

/// Reads atom data (.csv, or a JSON array of rows) or a JSON measure spec.
inline AtomicMeasure load_measure(const std::string& path, const MeasureContext& ctx, Json* info) {
  const std::string text = read_text_file(path);
  if (std::filesystem::path(path).extension() == ".csv") {
    if (info) *info = {{"kind", "atomic"}, {"file", path}};
    return measure_from_csv(text, path);
  }
  const Json j = parse_json(text, path);
  if (j.is_array()) {
    if (info) *info = {{"kind", "atomic"}, {"file", path}};
    return measure_from_json(j, path);
  }
  MeasureContext inner = ctx;
  inner.base_dir = std::filesystem::path(path).parent_path();
  return build_measure(j, inner, info);
}

}  // namespace selfsim
