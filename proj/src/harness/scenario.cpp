#include "mottlight/harness/scenario.hpp"

#include <functional>
#include <set>
#include <string>

#include <yaml-cpp/yaml.h>

#include "mottlight/harness/units.hpp"

namespace mottlight::harness {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::eit_scan, "eit-scan"},
    {ExperimentKind::store, "store"},
    {ExperimentKind::decay_scan, "decay-scan"},
    {ExperimentKind::ramsey, "ramsey"},
    {ExperimentKind::deflect, "deflect"},
};

int line_of(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.is_null() ? 0 : m.line + 1;
}

enum class Range { any, positive, non_negative, fraction, nonzero };

void check_range(double v, Range range, const std::string& key, const YAML::Node& node) {
  bool ok = true;
  const char* need = "";
  switch (range) {
    case Range::any: break;
    case Range::positive: ok = v > 0; need = "> 0"; break;
    case Range::non_negative: ok = v >= 0; need = ">= 0"; break;
    case Range::fraction: ok = v >= 0 && v <= 1; need = "in [0, 1]"; break;
    case Range::nonzero: ok = v != 0; need = "nonzero"; break;
  }
  if (!ok) throw ParseError("'" + key + "' must be " + need, line_of(node));
}

// Reads one mapping and remembers which keys were used, so that anything
// left over can be reported as unknown.
class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (!node_.IsMap()) throw ParseError("'" + name_ + "' must be a mapping", line_of(node_));
  }

  void quantity(const std::string& key, Dimension dim, Range range, double& out) {
    if (const YAML::Node n = take(key)) out = read(n, key, dim, range);
  }

  void optional_quantity(const std::string& key, Dimension dim, Range range,
                         std::optional<double>& out) {
    if (const YAML::Node n = take(key)) out = read(n, key, dim, range);
  }

  void list(const std::string& key, Dimension dim, Range range, std::vector<double>& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    if (!n.IsSequence()) throw ParseError("'" + key + "' must be a list", line_of(n));
    out.clear();
    for (const YAML::Node& item : n) out.push_back(read(item, key, dim, range));
  }

  void integer(const std::string& key, long lo, long hi, int& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    long v = 0;
    try {
      v = n.as<long>();
    } catch (const YAML::Exception&) {
      throw ParseError("'" + key + "' must be an integer", line_of(n));
    }
    if (v < lo || v > hi) {
      throw ParseError("'" + key + "' must lie in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]",
                       line_of(n));
    }
    out = static_cast<int>(v);
  }

  void boolean(const std::string& key, bool& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    try {
      out = n.as<bool>();
    } catch (const YAML::Exception&) {
      throw ParseError("'" + key + "' must be true or false", line_of(n));
    }
  }

  void text(const std::string& key, std::string& out, const std::set<std::string>& allowed = {}) {
    const YAML::Node n = take(key);
    if (!n) return;
    if (!n.IsScalar()) throw ParseError("'" + key + "' must be a string", line_of(n));
    out = n.as<std::string>();
    if (!allowed.empty() && !allowed.count(out)) {
      std::string options;
      for (const auto& a : allowed) options += (options.empty() ? "" : ", ") + a;
      throw ParseError("'" + key + "' must be one of: " + options, line_of(n));
    }
  }

  void triple(const std::string& key, Dimension dim, Range range, std::array<double, 3>& out) {
    std::vector<double> v;
    const YAML::Node n = node_[key];
    list(key, dim, range, v);
    if (!n) return;
    if (v.size() != 3) throw ParseError("'" + key + "' needs exactly 3 values", line_of(n));
    std::copy(v.begin(), v.end(), out.begin());
  }

  YAML::Node take(const std::string& key) {
    used_.insert(key);
    return node_[key];  // const lookup: never inserts
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) {
        throw ParseError("unknown key '" + key + "' in " + name_, line_of(kv.first));
      }
    }
  }

 private:
  static double read(const YAML::Node& n, const std::string& key, Dimension dim, Range range) {
    if (!n.IsScalar()) throw ParseError("'" + key + "' must be a single value", line_of(n));
    double v = 0.0;
    try {
      v = parse_quantity(n.as<std::string>(), dim);
    } catch (const UnitError& e) {
      throw ParseError("'" + key + "': " + e.what(), line_of(n));
    }
    check_range(v, range, key, n);
    return v;
  }

  const YAML::Node node_;
  std::string name_;
  std::set<std::string> used_;
};

void read_cloud(Section s, CloudSection& c) {
  s.triple("radii", Dimension::length, Range::positive, c.radii);
  s.triple("lattice_wavelengths", Dimension::length, Range::positive, c.lattice_wavelengths);
  s.quantity("filling", Dimension::dimensionless, Range::fraction, c.filling);
  s.optional_quantity("atom_number", Dimension::dimensionless, Range::positive, c.atom_number);
  s.optional_quantity("line_strength_factor", Dimension::dimensionless, Range::non_negative,
                      c.line_strength_factor);
  s.finish();
}

void read_probe_beam(Section s, ProbeBeamSection& p) {
  s.quantity("waist", Dimension::length, Range::positive, p.waist);
  s.quantity("offset_y", Dimension::length, Range::any, p.offset_y);
  s.quantity("offset_z", Dimension::length, Range::any, p.offset_z);
  s.finish();
}

void read_eit(Section s, EitSection& e) {
  s.quantity("coupling_rabi", Dimension::angular_frequency, Range::non_negative, e.coupling_rabi);
  s.quantity("probe_rabi", Dimension::angular_frequency, Range::non_negative, e.probe_rabi);
  s.quantity("pi_leak_fraction", Dimension::dimensionless, Range::fraction, e.pi_leak_fraction);
  s.quantity("ground_decoherence", Dimension::angular_frequency, Range::non_negative,
             e.ground_decoherence);
  s.quantity("probe_duration", Dimension::time, Range::positive, e.probe_duration);
  s.quantity("scan_half_width", Dimension::angular_frequency, Range::positive, e.scan_half_width);
  s.integer("scan_points", 5, 100000, e.scan_points);
  s.integer("transverse_cells", 8, 4096, e.transverse_cells);
  s.integer("propagation_slices", 8, 4096, e.propagation_slices);
  s.optional_quantity("peak_optical_depth", Dimension::dimensionless, Range::non_negative,
                      e.peak_optical_depth);
  s.finish();
}

void read_storage(Section s, StorageSection& st) {
  s.quantity("optical_depth", Dimension::dimensionless, Range::positive, st.optical_depth);
  s.quantity("coupling_rabi", Dimension::angular_frequency, Range::positive, st.coupling_rabi);
  s.quantity("probe_rabi", Dimension::angular_frequency, Range::non_negative, st.probe_rabi);
  s.quantity("probe_fwhm", Dimension::time, Range::positive, st.probe_fwhm);
  s.quantity("one_photon_detuning", Dimension::angular_frequency, Range::any,
             st.one_photon_detuning);
  s.quantity("storage_time", Dimension::time, Range::non_negative, st.storage_time);
  s.list("storage_times", Dimension::time, Range::non_negative, st.storage_times);
  s.list("optical_depth_sweep", Dimension::dimensionless, Range::positive, st.optical_depth_sweep);
  s.quantity("spinwave_coherence_time", Dimension::time, Range::positive,
             st.spinwave_coherence_time);
  s.integer("z_points", 32, 1 << 16, st.z_points);
  s.quantity("time_step", Dimension::dimensionless, Range::positive, st.time_step);
  s.quantity("read_duration", Dimension::time, Range::non_negative, st.read_duration);
  s.text("integrator", st.integrator, {"rk4", "adiabatic"});
  s.quantity("noise_fraction", Dimension::dimensionless, Range::fraction, st.noise_fraction);
  s.finish();
}

void read_ramsey(Section s, RamseySection& r) {
  s.quantity("coherence_time", Dimension::time, Range::positive, r.coherence_time);
  s.list("dark_times", Dimension::time, Range::non_negative, r.dark_times);
  s.finish();
}

void read_deflection(Section s, DeflectionSection& d) {
  s.quantity("gradient_waist", Dimension::length, Range::positive, d.gradient_waist);
  s.quantity("gradient_offset_y", Dimension::length, Range::any, d.gradient_offset_y);
  s.quantity("gradient_detuning", Dimension::angular_frequency, Range::nonzero,
             d.gradient_detuning);
  s.quantity("gradient_peak_intensity", Dimension::intensity, Range::non_negative,
             d.gradient_peak_intensity);
  s.quantity("center_shift", Dimension::angular_frequency, Range::any, d.center_shift);
  s.list("interaction_times", Dimension::time, Range::non_negative, d.interaction_times);
  s.quantity("defocus", Dimension::length, Range::positive, d.defocus);
  s.integer("grid_points", 16, 8192, d.grid_points);
  s.quantity("grid_spacing", Dimension::length, Range::positive, d.grid_spacing);
  s.quantity("storage_time", Dimension::time, Range::non_negative, d.storage_time);
  s.text("slope_convention", d.slope_convention, {"spinwave-weighted", "cloud-center"});
  s.boolean("write_images", d.write_images);
  s.finish();
  if (d.grid_points % 2 != 0) throw ParseError("'grid_points' must be even", 0);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

ScenarioConfig parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
  if (!root || root.IsNull()) throw ParseError("empty scenario", 0);
  Section top(root, "scenario");
  ScenarioConfig config;

  const YAML::Node kind = top.take("experiment");
  if (!kind) throw ParseError("missing 'experiment'", line_of(root));
  const std::string kind_name = kind.IsScalar() ? kind.as<std::string>() : "";
  bool known = false;
  for (const auto& [k, name] : kKindNames) {
    if (kind_name == name) {
      config.experiment = k;
      known = true;
    }
  }
  if (!known) {
    throw ParseError("unknown experiment '" + kind_name +
                         "' (eit-scan, store, decay-scan, ramsey, deflect)",
                     line_of(kind));
  }

  top.text("description", config.description);
  top.text("output_dir", config.output_dir);
  if (const YAML::Node seed = top.take("seed")) {
    try {
      config.seed = seed.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      throw ParseError("'seed' must be a non-negative integer", line_of(seed));
    }
  }
  auto section = [&](const char* key, auto reader, auto& target) {
    if (const YAML::Node n = top.take(key)) reader(Section(n, key), target);
  };
  section("cloud", read_cloud, config.cloud);
  section("probe_beam", read_probe_beam, config.probe_beam);
  section("eit", read_eit, config.eit);
  section("storage", read_storage, config.storage);
  section("ramsey", read_ramsey, config.ramsey);
  section("deflection", read_deflection, config.deflection);
  top.finish();
  return config;
}

namespace {

void emit(YAML::Emitter& out, const char* key, double v, Dimension dim) {
  out << YAML::Key << key << YAML::Value << format_quantity(v, dim);
}

void emit(YAML::Emitter& out, const char* key, const std::vector<double>& v, Dimension dim) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << format_quantity(x, dim);
  out << YAML::EndSeq;
}

void emit(YAML::Emitter& out, const char* key, const std::array<double, 3>& v, Dimension dim) {
  emit(out, key, std::vector<double>(v.begin(), v.end()), dim);
}

void emit(YAML::Emitter& out, const char* key, const std::optional<double>& v, Dimension dim) {
  if (v) emit(out, key, *v, dim);
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& c) {
  using D = Dimension;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "experiment" << YAML::Value << to_string(c.experiment);
  if (!c.description.empty()) {
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << c.description;
  }
  if (c.seed) out << YAML::Key << "seed" << YAML::Value << *c.seed;
  if (!c.output_dir.empty()) {
    out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  }

  out << YAML::Key << "cloud" << YAML::Value << YAML::BeginMap;
  emit(out, "radii", c.cloud.radii, D::length);
  emit(out, "lattice_wavelengths", c.cloud.lattice_wavelengths, D::length);
  emit(out, "filling", c.cloud.filling, D::dimensionless);
  emit(out, "atom_number", c.cloud.atom_number, D::dimensionless);
  emit(out, "line_strength_factor", c.cloud.line_strength_factor, D::dimensionless);
  out << YAML::EndMap;

  out << YAML::Key << "probe_beam" << YAML::Value << YAML::BeginMap;
  emit(out, "waist", c.probe_beam.waist, D::length);
  emit(out, "offset_y", c.probe_beam.offset_y, D::length);
  emit(out, "offset_z", c.probe_beam.offset_z, D::length);
  out << YAML::EndMap;

  const EitSection& e = c.eit;
  out << YAML::Key << "eit" << YAML::Value << YAML::BeginMap;
  emit(out, "coupling_rabi", e.coupling_rabi, D::angular_frequency);
  emit(out, "probe_rabi", e.probe_rabi, D::angular_frequency);
  emit(out, "pi_leak_fraction", e.pi_leak_fraction, D::dimensionless);
  emit(out, "ground_decoherence", e.ground_decoherence, D::angular_frequency);
  emit(out, "probe_duration", e.probe_duration, D::time);
  emit(out, "scan_half_width", e.scan_half_width, D::angular_frequency);
  out << YAML::Key << "scan_points" << YAML::Value << e.scan_points;
  out << YAML::Key << "transverse_cells" << YAML::Value << e.transverse_cells;
  out << YAML::Key << "propagation_slices" << YAML::Value << e.propagation_slices;
  emit(out, "peak_optical_depth", e.peak_optical_depth, D::dimensionless);
  out << YAML::EndMap;

  const StorageSection& s = c.storage;
  out << YAML::Key << "storage" << YAML::Value << YAML::BeginMap;
  emit(out, "optical_depth", s.optical_depth, D::dimensionless);
  emit(out, "coupling_rabi", s.coupling_rabi, D::angular_frequency);
  emit(out, "probe_rabi", s.probe_rabi, D::angular_frequency);
  emit(out, "probe_fwhm", s.probe_fwhm, D::time);
  emit(out, "one_photon_detuning", s.one_photon_detuning, D::angular_frequency);
  emit(out, "storage_time", s.storage_time, D::time);
  emit(out, "storage_times", s.storage_times, D::time);
  emit(out, "optical_depth_sweep", s.optical_depth_sweep, D::dimensionless);
  emit(out, "spinwave_coherence_time", s.spinwave_coherence_time, D::time);
  out << YAML::Key << "z_points" << YAML::Value << s.z_points;
  emit(out, "time_step", s.time_step, D::dimensionless);
  emit(out, "read_duration", s.read_duration, D::time);
  out << YAML::Key << "integrator" << YAML::Value << s.integrator;
  emit(out, "noise_fraction", s.noise_fraction, D::dimensionless);
  out << YAML::EndMap;

  out << YAML::Key << "ramsey" << YAML::Value << YAML::BeginMap;
  emit(out, "coherence_time", c.ramsey.coherence_time, D::time);
  emit(out, "dark_times", c.ramsey.dark_times, D::time);
  out << YAML::EndMap;

  const DeflectionSection& d = c.deflection;
  out << YAML::Key << "deflection" << YAML::Value << YAML::BeginMap;
  emit(out, "gradient_waist", d.gradient_waist, D::length);
  emit(out, "gradient_offset_y", d.gradient_offset_y, D::length);
  emit(out, "gradient_detuning", d.gradient_detuning, D::angular_frequency);
  emit(out, "gradient_peak_intensity", d.gradient_peak_intensity, D::intensity);
  emit(out, "center_shift", d.center_shift, D::angular_frequency);
  emit(out, "interaction_times", d.interaction_times, D::time);
  emit(out, "defocus", d.defocus, D::length);
  out << YAML::Key << "grid_points" << YAML::Value << d.grid_points;
  emit(out, "grid_spacing", d.grid_spacing, D::length);
  emit(out, "storage_time", d.storage_time, D::time);
  out << YAML::Key << "slope_convention" << YAML::Value << d.slope_convention;
  out << YAML::Key << "write_images" << YAML::Value << d.write_images;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace mottlight::harness
