#include "rotortrack/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rotortrack/errors.hpp"

namespace rotortrack {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& require_object(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.contains(key)) throw ConfigError(join(path, key), "missing required section");
  const Json& v = doc.at(key);
  if (!v.is_object()) throw ConfigError(join(path, key), "must be an object");
  return v;
}

void reject_unknown(const Json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const Json& obj, const std::string& key, const std::string& path, std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(join(path, key), "missing required key");
    return *fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

double positive(const Json& obj, const std::string& key, const std::string& path, std::optional<double> fallback) {
  const double x = number(obj, key, path, fallback);
  if (!(x > 0.0)) throw ConfigError(join(path, key), "must be positive");
  return x;
}

double non_negative(const Json& obj, const std::string& key, const std::string& path, double fallback) {
  const double x = number(obj, key, path, fallback);
  if (x < 0.0) throw ConfigError(join(path, key), "must be >= 0");
  return x;
}

long integer(const Json& obj, const std::string& key, const std::string& path, std::optional<long> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(join(path, key), "missing required key");
    return *fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
  return v.get<long>();
}

std::string text(const Json& obj, const std::string& key, const std::string& path,
                 std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError(join(path, key), "missing required key");
    return *fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
  return v.get<std::string>();
}

bool boolean(const Json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "must be true or false");
  return v.get<bool>();
}

RotorConfig parse_rotor(const Json& obj) {
  const std::string p = "rotor";
  reject_unknown(obj, p, {"B_invcm", "mu_debye", "M"});
  RotorConfig r;
  r.b_invcm = positive(obj, "B_invcm", p, std::nullopt);
  r.mu_debye = positive(obj, "mu_debye", p, std::nullopt);
  const long m = integer(obj, "M", p, 16);
  if (m < 1 || m > 512) throw ConfigError("rotor.M", "basis cutoff must be in [1, 512]");
  r.cutoff = static_cast<int>(m);
  return r;
}

SimulationConfig parse_simulation(const Json& obj, const UnitSystem& units, int cutoff) {
  const std::string p = "simulation";
  reject_unknown(obj, p,
                 {"T_reduced", "T_ps", "dt", "midpoint_iters", "leakage_tol", "record_stride", "consistency",
                  "consistency_tol", "initial_m"});
  SimulationConfig s;
  const bool has_reduced = obj.contains("T_reduced");
  const bool has_ps = obj.contains("T_ps");
  if (has_reduced == has_ps) throw ConfigError("simulation", "give exactly one of T_reduced and T_ps");
  if (has_reduced) {
    s.t_reduced = positive(obj, "T_reduced", p, std::nullopt);
    s.duration = *s.t_reduced;
  } else {
    s.t_ps = positive(obj, "T_ps", p, std::nullopt);
    s.duration = units.from_ps(*s.t_ps);
  }
  SimParams& sp = s.params;
  sp.duration = s.duration;
  sp.dt = positive(obj, "dt", p, 1e-4);
  if (sp.dt > s.duration) throw ConfigError("simulation.dt", "must not exceed T");
  const long iters = integer(obj, "midpoint_iters", p, 0);
  if (iters < 0 || iters > 8) throw ConfigError("simulation.midpoint_iters", "must be in [0, 8]");
  sp.midpoint_iters = static_cast<int>(iters);
  sp.leakage_tol = positive(obj, "leakage_tol", p, 1e-6);
  const long stride = integer(obj, "record_stride", p, 0);
  if (stride < 0) throw ConfigError("simulation.record_stride", "must be >= 0 (0 = automatic)");
  sp.record_stride = static_cast<int>(stride);
  const std::string mode = text(obj, "consistency", p, "warn");
  if (mode == "warn") {
    sp.consistency = ConsistencyMode::kWarn;
  } else if (mode == "strict") {
    sp.consistency = ConsistencyMode::kStrict;
  } else {
    throw ConfigError("simulation.consistency", "must be \"warn\" or \"strict\"");
  }
  sp.consistency_tol = positive(obj, "consistency_tol", p, 1e-6);
  const long m0 = integer(obj, "initial_m", p, 0);
  if (std::abs(m0) >= cutoff) throw ConfigError("simulation.initial_m", "must satisfy |m| < M");
  s.initial_m = static_cast<int>(m0);
  return s;
}

TrackConfig parse_track(const Json& obj, double duration, const UnitSystem& units,
                        const std::filesystem::path& base_dir) {
  const std::string p = "track";
  const std::string kind = text(obj, "kind", p, std::nullopt);
  const std::set<std::string> common = {"kind", "blend_in", "field_cutoff"};
  auto allowed = [&](std::set<std::string> extra) {
    extra.insert(common.begin(), common.end());
    return extra;
  };

  TrackConfig t;
  t.blend_in = non_negative(obj, "blend_in", p, 0.0);
  if (t.blend_in > duration) throw ConfigError("track.blend_in", "window must not exceed T");
  t.field_cutoff = non_negative(obj, "field_cutoff", p, 0.0);

  if (kind == "gaussian") {
    reject_unknown(obj, p, allowed({"alpha", "x_center", "y_center", "width"}));
    t.kind = TrackKind::kGaussian;
    GaussianParams& g = t.gaussian;
    g.duration = duration;
    g.alpha = number(obj, "alpha", p, std::nullopt);
    if (!(g.alpha > 0.0 && g.alpha < 1.0)) {
      throw ConfigError("track.alpha", "alpha must satisfy 0 < alpha < 1 (the track must stay inside the unit disk)");
    }
    g.x_center = number(obj, "x_center", p, 0.4);
    g.y_center = number(obj, "y_center", p, 0.8);
    g.width = positive(obj, "width", p, 1.0 / 15.0);
  } else if (kind == "spiral") {
    reject_unknown(obj, p, allowed({"beta", "omega", "c1", "c2", "c2_unit", "c2_literal", "c3"}));
    t.kind = TrackKind::kSpiral;
    const bool literal = boolean(obj, "c2_literal", p, false);
    if (literal && obj.contains("c2")) throw ConfigError("track.c2_literal", "conflicts with an explicit c2");
    SpiralParams s = literal ? SpiralParams::literal(duration) : SpiralParams::preset(duration);
    s.beta = positive(obj, "beta", p, s.beta);
    if (!(s.beta * duration < 1.0)) {
      throw ConfigError("track.beta", "beta * T must be < 1 (the final radius would reach the unit circle)");
    }
    s.omega = number(obj, "omega", p, s.omega);
    s.c1 = positive(obj, "c1", p, s.c1);
    s.c2 = non_negative(obj, "c2", p, s.c2);
    s.c3 = positive(obj, "c3", p, s.c3);
    const std::string unit = text(obj, "c2_unit", p, "reduced");
    if (unit == "per_ps") {
      s.c2 *= units.time_unit_ps();
    } else if (unit != "reduced") {
      throw ConfigError("track.c2_unit", "must be \"reduced\" or \"per_ps\"");
    }
    t.spiral = s;
  } else if (kind == "data") {
    reject_unknown(obj, p, allowed({"file", "parameterization", "resample_n", "smooth_cutoff", "rescale_to"}));
    t.kind = TrackKind::kData;
    std::filesystem::path file = text(obj, "file", p, std::nullopt);
    if (file.is_relative()) file = base_dir / file;
    t.data_file = file.lexically_normal().string();
    DataTrackOptions& d = t.data;
    d.duration = duration;
    const std::string param = text(obj, "parameterization", p, "index");
    if (param == "index") {
      d.parameterization = Parameterization::kIndex;
    } else if (param == "arc_length") {
      d.parameterization = Parameterization::kArcLength;
    } else {
      throw ConfigError("track.parameterization", "must be \"index\" or \"arc_length\"");
    }
    const long n = integer(obj, "resample_n", p, 0);
    if (n != 0 && n < 4) throw ConfigError("track.resample_n", "must be 0 (off) or >= 4");
    d.resample_n = static_cast<std::size_t>(n);
    d.smooth_cutoff = non_negative(obj, "smooth_cutoff", p, 0.0);
    d.rescale_to = non_negative(obj, "rescale_to", p, 0.0);
    if (d.rescale_to >= 1.0) throw ConfigError("track.rescale_to", "must be < 1");
  } else {
    throw ConfigError("track.kind", "must be one of gaussian, spiral, data (got \"" + kind + "\")");
  }
  return t;
}

OutputConfig parse_output(const Json& obj) {
  const std::string p = "output";
  reject_unknown(obj, p, {"directory", "formats", "frame_count", "preview_samples"});
  OutputConfig o;
  o.directory = text(obj, "directory", p, o.directory);
  if (obj.contains("formats")) {
    const Json& f = obj.at("formats");
    if (!f.is_array()) throw ConfigError("output.formats", "must be an array of strings");
    o.svg = false;
    o.frames = false;
    for (const Json& item : f) {
      const std::string name = item.is_string() ? item.get<std::string>() : std::string();
      if (name == "csv") continue;
      if (name == "svg") {
        o.svg = true;
      } else if (name == "frames") {
        o.frames = true;
      } else {
        throw ConfigError("output.formats", "entries must be \"csv\", \"svg\" or \"frames\"");
      }
    }
  }
  const long frames = integer(obj, "frame_count", p, o.frame_count);
  if (frames < 1) throw ConfigError("output.frame_count", "must be >= 1");
  o.frame_count = static_cast<int>(frames);
  const long preview = integer(obj, "preview_samples", p, o.preview_samples);
  if (preview < 2) throw ConfigError("output.preview_samples", "must be >= 2");
  o.preview_samples = static_cast<int>(preview);
  return o;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "top level must be a JSON object");
  reject_unknown(doc, "", {"rotor", "simulation", "track", "guard", "output"});

  RunConfig c;
  c.rotor = parse_rotor(require_object(doc, "rotor", ""));
  const UnitSystem units = c.units();
  c.simulation = parse_simulation(require_object(doc, "simulation", ""), units, c.rotor.cutoff);
  c.track = parse_track(require_object(doc, "track", ""), c.simulation.duration, units, base_dir);
  if (doc.contains("guard")) {
    const Json& g = require_object(doc, "guard", "");
    reject_unknown(g, "guard", {"d_min", "margin_min"});
    c.guard.d_min = positive(g, "d_min", "guard", c.guard.d_min);
    c.guard.margin_min = positive(g, "margin_min", "guard", c.guard.margin_min);
  }
  if (doc.contains("output")) c.output = parse_output(require_object(doc, "output", ""));
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path());
}

std::string resolved_config_json(const RunConfig& c) {
  OrderedJson doc;
  doc["rotor"] = {{"B_invcm", c.rotor.b_invcm}, {"mu_debye", c.rotor.mu_debye}, {"M", c.rotor.cutoff}};

  const SimParams& sp = c.simulation.params;
  OrderedJson sim;
  if (c.simulation.t_ps) {
    sim["T_ps"] = *c.simulation.t_ps;
  } else {
    sim["T_reduced"] = c.simulation.duration;
  }
  sim["dt"] = sp.dt;
  sim["midpoint_iters"] = sp.midpoint_iters;
  sim["leakage_tol"] = sp.leakage_tol;
  sim["record_stride"] = sp.record_stride;
  sim["consistency"] = sp.consistency == ConsistencyMode::kStrict ? "strict" : "warn";
  sim["consistency_tol"] = sp.consistency_tol;
  sim["initial_m"] = c.simulation.initial_m;
  doc["simulation"] = sim;

  OrderedJson track;
  const TrackConfig& t = c.track;
  switch (t.kind) {
    case TrackKind::kGaussian:
      track["kind"] = "gaussian";
      track["alpha"] = t.gaussian.alpha;
      track["x_center"] = t.gaussian.x_center;
      track["y_center"] = t.gaussian.y_center;
      track["width"] = t.gaussian.width;
      break;
    case TrackKind::kSpiral:
      track["kind"] = "spiral";
      track["beta"] = t.spiral.beta;
      track["omega"] = t.spiral.omega;
      track["c1"] = t.spiral.c1;
      track["c2"] = t.spiral.c2;
      track["c2_unit"] = "reduced";
      track["c3"] = t.spiral.c3;
      break;
    default:
      track["kind"] = "data";
      track["file"] = t.data_file;
      track["parameterization"] = t.data.parameterization == Parameterization::kArcLength ? "arc_length" : "index";
      track["resample_n"] = t.data.resample_n;
      track["smooth_cutoff"] = t.data.smooth_cutoff;
      track["rescale_to"] = t.data.rescale_to;
      break;
  }
  track["blend_in"] = t.blend_in;
  track["field_cutoff"] = t.field_cutoff;
  doc["track"] = track;

  doc["guard"] = {{"d_min", c.guard.d_min}, {"margin_min", c.guard.margin_min}};

  OrderedJson formats = OrderedJson::array({"csv"});
  if (c.output.svg) formats.push_back("svg");
  if (c.output.frames) formats.push_back("frames");
  doc["output"] = {{"directory", c.output.directory},
                   {"formats", formats},
                   {"frame_count", c.output.frame_count},
                   {"preview_samples", c.output.preview_samples}};
  return doc.dump(2) + "\n";
}

std::string UnitReport::text() const {
  std::ostringstream os;
  os.precision(6);
  os << "time unit hbar/B   = " << time_unit_ps << " ps\n"
     << "field unit B/mu    = " << field_unit_v_per_m << " V/m\n"
     << "T                  = " << duration << " hbar/B = " << duration_ps << " ps\n"
     << "dt                 = " << dt << " hbar/B = " << dt_ps << " ps\n";
  return os.str();
}

UnitReport convert_units(const RunConfig& config) {
  const UnitSystem units = config.units();
  UnitReport r;
  r.time_unit_ps = units.time_unit_ps();
  r.field_unit_v_per_m = units.field_unit_v_per_m();
  r.duration = config.simulation.duration;
  r.duration_ps = units.to_ps(r.duration);
  r.dt = config.simulation.params.dt;
  r.dt_ps = units.to_ps(r.dt);
  return r;
}

Track build_track(const RunConfig& config) {
  const TrackConfig& t = config.track;
  Track track = [&] {
    switch (t.kind) {
      case TrackKind::kGaussian: return gaussian_track(t.gaussian);
      case TrackKind::kSpiral: return spiral_track(t.spiral);
      default: return data_track(read_track_csv(t.data_file), t.data);
    }
  }();
  if (t.blend_in > 0.0) track = blend_in(track, t.blend_in);
  return track;
}

}  // namespace rotortrack
