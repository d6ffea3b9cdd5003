#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "vortex/error.hpp"
#include "vortex/field_sim.hpp"
#include "vortex/gaussian_model.hpp"
#include "vortex/mc_oracle.hpp"
#include "vortex/quadrature.hpp"
#include "vortex/rates.hpp"
#include "vortex/spectra.hpp"
#include "vortex/spectrum_io.hpp"

namespace vortex::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string preset;
  double W = 1.0, c = 1.0, k = 1.0, omega = 1.0;
  int dim = 0;
  double field_variance = 1.0;
  std::string spectrum_file;
  std::optional<json> spectrum_inline;  // from a config file
  std::string config_file;
  double samples = 1e6;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string sweep;
  bool dump_matrices = false;
  bool verify = false;
  std::string format = "json";
  std::string output;
  std::size_t realizations = 0;  // 0: default for the dimension
  std::size_t waves = 200;
  double wavelengths = 0.0;
  double periods = 0.0;
  double spacing = 0.0;
  double time_step = 0.0;
  bool events = false;
  bool simulate = false;
  double sigmas = 4.0;
  int normalization_sets = 10;
};

using OptionMap = std::map<std::string, CLI::Option*>;

unsigned default_workers() {
  if (const char* env = std::getenv("VORTEX_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

void add_spectrum_options(CLI::App* s, Options& o, OptionMap& m) {
  m["preset"] = s->add_option("--preset", o.preset, "Spectrum preset")
                    ->check(CLI::IsMember({"blackbody", "monochromatic", "monochromatic-modulus",
                                           "special-dispersion"}));
  m["W"] = s->add_option("--W", o.W, "Blackbody temperature scale (frequency units)");
  m["c"] = s->add_option("--c", o.c, "Wave speed (blackbody, special-dispersion)");
  m["k"] = s->add_option("--k", o.k, "Wavenumber (monochromatic presets, special-dispersion)");
  m["omega"] = s->add_option("--omega", o.omega, "Angular frequency (monochromatic presets)");
  m["dim"] = s->add_option("--dim", o.dim, "Dimension 2 or 3 (default 3, or 2 for "
                                           "special-dispersion)")
                 ->check(CLI::IsMember({2, 3}));
  m["field-variance"] =
      s->add_option("--field-variance", o.field_variance, "<f^2> (default 1)");
  m["spectrum"] = s->add_option("--spectrum", o.spectrum_file, "Spectrum JSON file");
  m["config"] = s->add_option("--config", o.config_file,
                              "JSON file whose keys are long flag names; flags win");
  m["format"] = s->add_option("--format", o.format, "Output format")
                    ->check(CLI::IsMember({"json", "csv", "jsonl"}));
  m["output"] = s->add_option("--output", o.output, "Write results to this file");
}

void add_seed_options(CLI::App* s, Options& o, OptionMap& m) {
  m["seed"] = s->add_option("--seed", o.seed, "RNG seed (required)");
  m["workers"] = s->add_option("--workers", o.workers,
                               "Worker threads (default $VORTEX_WORKERS or 1)")
                     ->check(CLI::PositiveNumber);
}

void add_mc_options(CLI::App* s, Options& o, OptionMap& m) {
  m["samples"] = s->add_option("--samples", o.samples, "Monte-Carlo samples (e.g. 1e6)")
                     ->check(CLI::PositiveNumber);
  m["sigmas"] = s->add_option("--sigmas", o.sigmas,
                              "Pass threshold in standard errors (default 4)")
                    ->check(CLI::PositiveNumber);
}

void add_sim_options(CLI::App* s, Options& o, OptionMap& m) {
  m["realizations"] = s->add_option("--realizations", o.realizations,
                                    "Independent realizations (default 50 in 2D, 8 in 3D)");
  m["waves"] = s->add_option("--waves", o.waves, "Plane waves per realization")
                   ->check(CLI::Range(2, 1000000));
  m["wavelengths"] = s->add_option("--wavelengths", o.wavelengths,
                                   "Box side in wavelengths 2 pi / sqrt(k2)");
  m["periods"] = s->add_option("--periods", o.periods,
                               "Box duration in units of 2 pi / sigma_omega");
  m["spacing"] = s->add_option("--spacing", o.spacing, "Seed grid spacing");
  m["time-step"] = s->add_option("--time-step", o.time_step, "Seed grid time step");
}

// Applies config-file values for every option not given on the command line.
void apply_config(Options& o, const OptionMap& m) {
  if (o.config_file.empty()) return;
  std::ifstream in(o.config_file);
  if (!in) throw UsageError("cannot read config file " + o.config_file);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  const std::map<std::string, std::function<void(const json&)>> setters = {
      {"preset", [&](const json& v) { o.preset = v.get<std::string>(); }},
      {"W", [&](const json& v) { o.W = v.get<double>(); }},
      {"c", [&](const json& v) { o.c = v.get<double>(); }},
      {"k", [&](const json& v) { o.k = v.get<double>(); }},
      {"omega", [&](const json& v) { o.omega = v.get<double>(); }},
      {"dim", [&](const json& v) { o.dim = v.get<int>(); }},
      {"field-variance", [&](const json& v) { o.field_variance = v.get<double>(); }},
      {"spectrum",
       [&](const json& v) {
         if (v.is_string()) {
           o.spectrum_file = v.get<std::string>();
         } else {
           o.spectrum_inline = v;
         }
       }},
      {"format", [&](const json& v) { o.format = v.get<std::string>(); }},
      {"output", [&](const json& v) { o.output = v.get<std::string>(); }},
      {"seed", [&](const json& v) { o.seed = v.get<std::uint64_t>(); }},
      {"workers", [&](const json& v) { o.workers = v.get<unsigned>(); }},
      {"samples", [&](const json& v) { o.samples = v.get<double>(); }},
      {"sigmas", [&](const json& v) { o.sigmas = v.get<double>(); }},
      {"sweep", [&](const json& v) { o.sweep = v.get<std::string>(); }},
      {"dump-matrices", [&](const json& v) { o.dump_matrices = v.get<bool>(); }},
      {"verify", [&](const json& v) { o.verify = v.get<bool>(); }},
      {"realizations", [&](const json& v) { o.realizations = v.get<std::size_t>(); }},
      {"waves", [&](const json& v) { o.waves = v.get<std::size_t>(); }},
      {"wavelengths", [&](const json& v) { o.wavelengths = v.get<double>(); }},
      {"periods", [&](const json& v) { o.periods = v.get<double>(); }},
      {"spacing", [&](const json& v) { o.spacing = v.get<double>(); }},
      {"time-step", [&](const json& v) { o.time_step = v.get<double>(); }},
      {"events", [&](const json& v) { o.events = v.get<bool>(); }},
      {"simulate", [&](const json& v) { o.simulate = v.get<bool>(); }},
      {"normalization-sets", [&](const json& v) { o.normalization_sets = v.get<int>(); }},
  };
  for (const auto& [key, value] : cfg.items()) {
    auto it = m.find(key);
    if (it == m.end() || !setters.count(key)) {
      throw UsageError("config key '" + key + "' is not an option of this command");
    }
    if (it->second->count() > 0) continue;  // the flag wins
    try {
      setters.at(key)(value);
    } catch (const json::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }
}

std::uint64_t sample_count(double samples) {
  if (!(samples >= 1.0) || samples > 1e15 || samples != std::floor(samples)) {
    throw UsageError("--samples must be a positive integer");
  }
  return static_cast<std::uint64_t>(samples);
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw UsageError("this command is stochastic: --seed is required");
  return *o.seed;
}

Spectrum preset_spectrum(const Options& o, const OptionMap& m) {
  // flags that the chosen preset does not use are rejected rather than ignored
  const std::map<std::string, std::vector<std::string>> uses = {
      {"blackbody", {"W", "c"}},
      {"monochromatic", {"k", "omega"}},
      {"monochromatic-modulus", {"k", "omega"}},
      {"special-dispersion", {"k", "c"}},
  };
  const auto& used = uses.at(o.preset);
  for (const char* p : {"W", "c", "k", "omega"}) {
    if (m.at(p)->count() > 0 && std::find(used.begin(), used.end(), p) == used.end()) {
      throw UsageError(std::string("--") + p + " does not apply to preset " + o.preset);
    }
  }
  if (o.preset == "special-dispersion") {
    if (o.dim == 3) throw UsageError("special-dispersion is a two-dimensional preset");
    return Spectrum(SpecialDispersion{o.k, o.c}, Dimension::two, o.field_variance);
  }
  const Dimension d = o.dim == 2 ? Dimension::two : Dimension::three;
  if (o.preset == "blackbody") return Spectrum(Blackbody{o.W, o.c}, d, o.field_variance);
  if (o.preset == "monochromatic") {
    return Spectrum(Monochromatic{o.k, o.omega}, d, o.field_variance);
  }
  return Spectrum(MonochromaticModulus{o.k, o.omega}, d, o.field_variance);
}

Spectrum resolve_spectrum(const Options& o, const OptionMap& m) {
  const int sources = (!o.preset.empty() ? 1 : 0) + (!o.spectrum_file.empty() ? 1 : 0) +
                      (o.spectrum_inline ? 1 : 0);
  if (sources == 0) throw UsageError("no spectrum: give --preset or --spectrum");
  if (sources > 1) throw UsageError("give exactly one spectrum source");
  if (!o.preset.empty()) return preset_spectrum(o, m);
  for (const char* p : {"W", "c", "k", "omega", "field-variance"}) {
    if (m.at(p)->count() > 0) {
      throw UsageError(std::string("--") + p + " only applies to presets");
    }
  }
  Spectrum s = o.spectrum_inline ? spectrum_from_json(o.spectrum_inline->dump())
                                 : load_spectrum_file(o.spectrum_file);
  if (o.dim != 0 && o.dim != to_int(s.dimension())) {
    throw UsageError("--dim disagrees with the spectrum file");
  }
  return s;
}

json moments_json(const SpectralMoments& m) {
  const ComponentMoments cm = component_moments(m);
  return json{{"k2", m.k2},
              {"k4", m.k4},
              {"w1", m.w1},
              {"w2", m.w2},
              {"wk2", m.wk2},
              {"f2", m.f2},
              {"kx2", cm.kx2},
              {"kx4", cm.kx4},
              {"wkx2", component_wk2(m)},
              {"frequency_variance", m.frequency_variance()}};
}

json spectrum_summary(const Spectrum& s) {
  json j = json::parse(spectrum_to_json(s));
  return j;
}

json rates_json(const EventRates& r) {
  json j{{"dimension", to_int(r.dimension)}, {"method", to_string(r.method)},
         {"units", r.units()}};
  if (r.dimension == Dimension::two) {
    j["pair_events"] = r.pair_events;
    j["creation"] = r.birth;
    j["annihilation"] = r.death;
  } else {
    j["reconnection"] = r.reconnection;
    j["birth"] = r.birth;
    j["death"] = r.death;
    j["birth_plus_death"] = r.birth_plus_death();
    j["total"] = r.total();
    j["loop_to_reconnection_ratio"] =
        r.reconnection > 0.0 ? json(loop_to_reconnection_ratio(r)) : json(nullptr);
  }
  if (r.standard_error) j["standard_error"] = *r.standard_error;
  return j;
}

EventRates closed_form(const SpectralMoments& m) {
  return m.dimension == Dimension::two ? rate_2d(m) : rates_3d(m);
}

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;      // in the units of `kind`
  double tolerance = 0.0;
  std::string kind;        // relative, absolute, sigmas, diagnostic
  bool passed = true;
  std::string note;
};

json check_json(const Check& c) {
  json j{{"group", c.group}, {"name", c.name},   {"value", c.value},
         {"reference", c.reference}, {"error", c.error}, {"tolerance", c.tolerance},
         {"kind", c.kind},   {"passed", c.passed}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Check relative(std::string group, std::string name, double value, double reference,
               double tol) {
  Check c{std::move(group), std::move(name), value, reference, 0.0, tol, "relative", true, {}};
  c.error = reference != 0.0 ? std::abs(value - reference) / std::abs(reference)
                             : std::abs(value);
  c.passed = std::isfinite(value) && c.error <= tol;
  return c;
}

Check absolute(std::string group, std::string name, double value, double reference,
               double tol) {
  Check c{std::move(group), std::move(name), value, reference, std::abs(value - reference),
          tol, "absolute", true, {}};
  c.passed = std::isfinite(value) && c.error <= tol;
  return c;
}

Check sigmas(std::string group, std::string name, double value, double stderr_,
             double reference, double n_sigma) {
  Check c{std::move(group), std::move(name), value, reference, 0.0, n_sigma, "sigmas", true, {}};
  const double diff = std::abs(value - reference);
  c.error = stderr_ > 0.0 ? diff / stderr_ : (diff == 0.0 ? 0.0 : INFINITY);
  c.passed = std::isfinite(value) && c.error <= n_sigma;
  std::ostringstream note;
  note.precision(3);
  note << "standard error " << stderr_;
  c.note = note.str();
  return c;
}

// ---- verification groups -------------------------------------------------

void closed_form_checks(const Spectrum& s, std::vector<Check>& out) {
  const SpectralMoments m = moments(s);
  if (m.dimension == Dimension::two) {
    const CorrelationModel2D model = build_2d(m);
    if (!model.degenerate) {
      out.push_back(absolute("matrix", "inverse_residual", inverse_residual(model), 0.0, 1e-10));
    }
    for (const auto& d : closed_form_discrepancies(model)) {
      out.push_back({"matrix", "closed_form_" + d.name, d.closed_form, d.numeric,
                     d.relative_error, 1e-9, "diagnostic", true,
                     "closed-form inverse entry disagrees with the numeric inverse"});
    }
    return;
  }
  const CorrelationModel3D model = build_3d(m);
  const EventRates cf = rates_3d(m);
  if (model.degenerate) {
    out.push_back(absolute("closed_form", "total_rate_rigid", cf.total(), 0.0, 0.0));
    return;
  }
  out.push_back(absolute("matrix", "inverse_residual", inverse_residual(model), 0.0, 1e-10));
  out.push_back(relative("matrix", "a_equals_half_Gamma_xy", model.a, 0.5 * model.Gamma_xy,
                         1e-10));
  out.push_back(relative("matrix", "jacobi_ratio", jacobi_ratio(model), 1.0 / m.f2, 1e-10));
  for (const auto& d : closed_form_discrepancies(model)) {
    out.push_back({"matrix", "closed_form_" + d.name, d.closed_form, d.numeric,
                   d.relative_error, 1e-9, "diagnostic", true,
                   "closed-form inverse entry disagrees with the numeric inverse"});
  }
  const EventRates res = rates_from_residues(contour_constants(model));
  out.push_back(relative("residues", "reconnection", res.reconnection, cf.reconnection, 1e-9));
  out.push_back(relative("residues", "birth_plus_death", res.birth_plus_death(),
                         cf.birth_plus_death(), 1e-9));
}

void quadrature_checks(const Spectrum& s, std::vector<Check>& out) {
  const SpectralMoments m = moments(s);
  const EventRates cf = closed_form(m);
  if (is_time_rigid(m)) {
    out.push_back(absolute("quadrature", "rigid_total", cf.total(), 0.0, 0.0));
    return;
  }
  if (m.dimension == Dimension::two) {
    const QuadratureResult q = reduced_integral_2d(build_2d(m));
    out.push_back(relative("quadrature", "reduced_2d", q.value, cf.pair_events, 1e-6));
    return;
  }
  const CorrelationModel3D model = build_3d(m);
  const ContourConstants cc = contour_constants(model);
  const QuadratureResult up = contour_integral(cc, {}, ContourShift::up);
  const QuadratureResult down = contour_integral(cc, {}, ContourShift::down);
  out.push_back(relative("quadrature", "contour_up_reconnection", up.value, cf.reconnection,
                         1e-6));
  out.push_back(relative("quadrature", "contour_down_birth_plus_death", down.value,
                         cf.birth_plus_death(), 1e-6));
  const QuadratureResult red = reduced_integral_3d(model);
  out.push_back(relative("quadrature", "reduced_3d_total", red.value, cf.total(), 1e-5));
}

void mc_checks(const Spectrum& s, const Options& o, std::vector<Check>& out) {
  const SpectralMoments m = moments(s);
  const EventRates cf = closed_form(m);
  McConfig cfg;
  cfg.n_samples = sample_count(o.samples);
  cfg.seed = require_seed(o);
  cfg.n_workers = o.workers;
  if (is_time_rigid(m)) {
    out.push_back(absolute("monte_carlo", "rigid_total", cf.total(), 0.0, 0.0));
    return;
  }
  if (m.dimension == Dimension::two) {
    const McEstimate e = mc_rate_2d(build_2d(m), cfg);
    out.push_back(sigmas("monte_carlo", "pair_events", e.value, e.standard_error,
                         cf.pair_events, o.sigmas));
    return;
  }
  const McEstimate e = mc_rate_3d(build_3d(m), cfg);
  out.push_back(sigmas("monte_carlo", "total", e.value, e.standard_error, cf.total(), o.sigmas));
  if (e.split) {
    out.push_back(sigmas("monte_carlo", "reconnection", e.split->reconnection,
                         e.split->reconnection_stderr, cf.reconnection, o.sigmas));
    out.push_back(sigmas("monte_carlo", "birth_plus_death", e.split->birth_death,
                         e.split->birth_death_stderr, cf.birth_plus_death(), o.sigmas));
  }
}

void normalization_checks(const Spectrum& s, const Options& o, std::vector<Check>& out) {
  std::mt19937_64 rng(o.seed.value_or(0));
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < o.normalization_sets; ++i) {
    for (;;) {
      const LocalForm2D c{nd(rng), nd(rng), nd(rng), nd(rng), nd(rng), nd(rng)};
      try {
        out.push_back(absolute("normalization", "local_form_2d_" + std::to_string(i),
                               normalization_check_2d(c), 1.0, 1e-5));
        break;
      } catch (const InvalidInput&) {
      }
    }
  }
  for (int i = 0; i < o.normalization_sets; ++i) {
    for (;;) {
      const LocalForm3D c{nd(rng), nd(rng), nd(rng), nd(rng), nd(rng),
                          nd(rng), nd(rng), nd(rng), nd(rng), nd(rng)};
      try {
        out.push_back(absolute("normalization", "local_form_3d_" + std::to_string(i),
                               normalization_check_3d(c), 1.0, 1e-5));
        break;
      } catch (const InvalidInput&) {
      }
    }
  }
  const SpectralMoments m = moments(s);
  if (m.dimension == Dimension::two) {
    McConfig cfg;
    cfg.n_samples = sample_count(o.samples);
    cfg.seed = o.seed.value_or(0);
    cfg.n_workers = o.workers;
    const AxisFixingReport a = axis_fixing_check(build_2d(m), cfg);
    out.push_back(relative("axis_fixing", "gradient_identity", a.gradient_rhs, a.gradient_lhs,
                           1e-10));
    out.push_back(relative("axis_fixing", "density_pinned", a.density_pinned, a.density_closed,
                           1e-10));
    out.push_back(sigmas("axis_fixing", "density_monte_carlo", a.density_mc,
                         a.density_mc_stderr, a.density_closed, o.sigmas));
  }
}

SimulationConfig simulation_config(const Spectrum& s, const Options& o) {
  SimulationConfig cfg = default_simulation(s, require_seed(o));
  const SpectralMoments m = moments(s);
  if (o.realizations > 0) cfg.realizations = o.realizations;
  cfg.n_waves = o.waves;
  cfg.n_workers = o.workers;
  if (o.wavelengths > 0.0 || o.periods > 0.0) {
    const bool two = m.dimension == Dimension::two;
    cfg.box = default_box(m, o.wavelengths > 0.0 ? o.wavelengths : (two ? 5.0 : 2.0),
                          o.periods > 0.0 ? o.periods : (two ? 2.0 : 1.0));
  }
  if (o.spacing > 0.0) cfg.grid.spacing = o.spacing;
  if (o.time_step > 0.0) cfg.grid.time_step = o.time_step;
  cfg.keep_events = o.events;
  return cfg;
}

void simulation_checks(const Spectrum& s, const Options& o, std::vector<Check>& out) {
  const SpectralMoments m = moments(s);
  const EventRates cf = closed_form(m);
  const SimulationReport r = simulate(s, simulation_config(s, o));
  if (m.dimension == Dimension::two) {
    out.push_back(relative("simulation", "pair_event_rate", r.rates.pair_events, cf.pair_events,
                           0.10));
    out.push_back(relative("simulation", "vortex_density", r.vortex_density,
                           component_moments(m).kx2 / (2.0 * kPi), 0.03));
  } else if (cf.reconnection > 0.0) {
    out.push_back(relative("simulation", "loop_to_reconnection_ratio", r.loop_ratio,
                           loop_to_reconnection_ratio(cf), 0.15));
  }
}

// ---- output ---------------------------------------------------------------

struct Output {
  json summary;
  std::vector<json> rows;
  std::string rows_name = "rows";
};

std::string csv_field(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

// Nested objects become dotted column names; arrays stay JSON text.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, out);
    } else if (value.is_array()) {
      out.emplace_back(name, json(value.dump()));
    } else {
      out.emplace_back(name, value);
    }
  }
}

void write_csv(const std::vector<json>& rows, std::ostream& os) {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, json>> flat;
  for (const auto& r : rows) {
    std::vector<std::pair<std::string, json>> f;
    flatten(r, "", f);
    std::map<std::string, json> row;
    for (auto& [k, v] : f) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
      row[k] = v;
    }
    flat.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : flat) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      auto it = row.find(columns[i]);
      os << (i ? "," : "") << (it == row.end() ? "" : csv_field(it->second));
    }
    os << "\n";
  }
}

void emit(const Output& o, const std::string& format, std::ostream& os) {
  if (format == "json") {
    json j = o.summary;
    if (!o.rows.empty()) j[o.rows_name] = o.rows;
    os << j.dump(2) << "\n";
  } else if (format == "jsonl") {
    for (const auto& r : o.rows) os << r.dump() << "\n";
    os << o.summary.dump() << "\n";
  } else {
    write_csv(o.rows.empty() ? std::vector<json>{o.summary} : o.rows, os);
  }
}

Output checks_output(const std::string& command, const Spectrum& s,
                     const std::vector<Check>& checks) {
  Output out;
  out.rows_name = "checks";
  std::size_t failures = 0;
  for (const auto& c : checks) {
    out.rows.push_back(check_json(c));
    if (!c.passed) ++failures;
  }
  out.summary = json{{"record", "summary"},
                     {"command", command},
                     {"spectrum", spectrum_summary(s)},
                     {"checks", checks.size()},
                     {"failures", failures},
                     {"passed", failures == 0}};
  return out;
}

// ---- commands -------------------------------------------------------------

struct Sweep {
  std::string name;
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& text) {
  // NAME=START:STOP:N
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--sweep expects NAME=START:STOP:N");
  Sweep s;
  s.name = text.substr(0, eq);
  if (s.name != "W" && s.name != "c" && s.name != "k" && s.name != "omega" &&
      s.name != "field-variance") {
    throw UsageError("--sweep parameter must be W, c, k, omega or field-variance");
  }
  std::stringstream ss(text.substr(eq + 1));
  std::string a, b, n;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n)) {
    throw UsageError("--sweep expects NAME=START:STOP:N");
  }
  double lo = 0.0, hi = 0.0;
  long count = 0;
  try {
    lo = std::stod(a);
    hi = std::stod(b);
    count = std::stol(n);
  } catch (const std::exception&) {
    throw UsageError("--sweep bounds must be numbers");
  }
  if (count < 1 || count > 100000) throw UsageError("--sweep N must be in [1, 100000]");
  for (long i = 0; i < count; ++i) {
    s.values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return s;
}

void set_param(Options& o, const std::string& name, double v) {
  if (name == "W") o.W = v;
  if (name == "c") o.c = v;
  if (name == "k") o.k = v;
  if (name == "omega") o.omega = v;
  if (name == "field-variance") o.field_variance = v;
}

Output cmd_moments(const Options& o, const OptionMap& m) {
  const Spectrum s = resolve_spectrum(o, m);
  const SpectralMoments mom = moments(s);
  Output out;
  out.summary = json{{"command", "moments"},
                     {"spectrum", spectrum_summary(s)},
                     {"moments", moments_json(mom)},
                     {"time_rigid", is_time_rigid(mom)}};
  json violations = json::array();
  for (const auto& v : validate(mom)) violations.push_back(v.detail);
  out.summary["violations"] = violations;
  json entries = json::object();
  for (const auto& [k, v] : correlation_entries(mom).labelled()) entries[k] = v;
  out.summary["correlations"] = entries;
  if (o.dump_matrices) {
    out.summary["matrices"] = json::parse(
        mom.dimension == Dimension::two ? matrices_json(build_2d(mom))
                                        : matrices_json(build_3d(mom)));
  }
  return out;
}

Output cmd_rates(const Options& o, const OptionMap& m, bool& failed) {
  if (!o.sweep.empty()) {
    if (o.preset.empty()) throw UsageError("--sweep needs a --preset");
    const Sweep sw = parse_sweep(o.sweep);
    Output out;
    out.rows_name = "sweep";
    Options local = o;
    for (double v : sw.values) {
      set_param(local, sw.name, v);
      const Spectrum s = resolve_spectrum(local, m);
      json row{{sw.name, v}};
      const json rates = rates_json(closed_form(moments(s)));
      for (const auto& [k, val] : rates.items()) row[k] = val;
      out.rows.push_back(row);
    }
    out.summary = json{{"record", "summary"}, {"command", "rates"}, {"sweep", sw.name},
                       {"points", sw.values.size()}};
    return out;
  }
  const Spectrum s = resolve_spectrum(o, m);
  const SpectralMoments mom = moments(s);
  Output out;
  out.summary = json{{"command", "rates"}, {"spectrum", spectrum_summary(s)}};
  const json rates = rates_json(closed_form(mom));
  for (const auto& [k, v] : rates.items()) out.summary[k] = v;
  if (o.verify) {
    std::vector<Check> checks;
    closed_form_checks(s, checks);
    quadrature_checks(s, checks);
    Output c = checks_output("rates", s, checks);
    out.rows = c.rows;
    out.rows_name = "checks";
    out.summary["passed"] = c.summary["passed"];
    failed = !c.summary["passed"].get<bool>();
  }
  return out;
}

Output cmd_simulate(const Options& o, const OptionMap& m) {
  const Spectrum s = resolve_spectrum(o, m);
  const SpectralMoments mom = moments(s);
  const SimulationConfig cfg = simulation_config(s, o);
  const SimulationReport r = simulate(s, cfg);
  const EventRates cf = closed_form(mom);
  Output out;
  out.rows_name = "events";
  for (const auto& e : r.events) {
    json loc = json::array({e.location(0), e.location(1)});
    if (mom.dimension == Dimension::three) loc.push_back(e.location(2));
    out.rows.push_back(json{{"realization", e.realization},
                            {"t", e.time},
                            {"position", loc},
                            {"kind", to_string(e.kind)},
                            {"classifier", e.classifier},
                            {"f_residual", e.f_residual},
                            {"g_residual", e.g_residual},
                            {"tangency_residual", e.tangency_residual},
                            {"iterations", e.iterations},
                            {"disc_classified", e.counted_in_disc}});
  }
  json box{{"lo", {cfg.box.lo(0), cfg.box.lo(1), cfg.box.lo(2)}},
           {"hi", {cfg.box.hi(0), cfg.box.hi(1), cfg.box.hi(2)}},
           {"t0", cfg.box.t0},
           {"t1", cfg.box.t1}};
  json summary{{"record", "summary"},
               {"command", "simulate"},
               {"spectrum", spectrum_summary(s)},
               {"seed", cfg.seed},
               {"realizations", cfg.realizations},
               {"waves", cfg.n_waves},
               {"box", box},
               {"grid", {{"spacing", cfg.grid.spacing}, {"time_step", cfg.grid.time_step}}},
               {"measure", r.measure},
               {"seeds", r.seeds},
               {"duplicates", r.duplicates},
               {"discarded", r.discarded},
               {"ambiguous_merges", r.ambiguous}};
  if (mom.dimension == Dimension::two) {
    summary["counts"] = {{"creation", r.creations},
                         {"annihilation", r.annihilations},
                         {"disc_classified", r.disc_classified}};
    summary["pair_event_rate"] = {{"value", r.rates.pair_events},
                                  {"standard_error", r.total_rate_stderr},
                                  {"closed_form", cf.pair_events}};
    summary["vortex_density"] = {{"value", r.vortex_density},
                                 {"standard_error", r.vortex_density_stderr},
                                 {"closed_form", component_moments(mom).kx2 / (2.0 * kPi)}};
  } else {
    summary["counts"] = {
        {"reconnection", r.reconnections}, {"birth", r.births}, {"death", r.deaths}};
    summary["reconnection_rate"] = {{"value", r.rates.reconnection},
                                    {"standard_error", r.reconnection_stderr},
                                    {"closed_form", cf.reconnection}};
    summary["birth_plus_death_rate"] = {{"value", r.rates.birth_plus_death()},
                                        {"standard_error", r.loop_stderr},
                                        {"closed_form", cf.birth_plus_death()}};
    summary["loop_to_reconnection_ratio"] = {
        {"value", r.loop_ratio},
        {"standard_error", r.loop_ratio_stderr},
        {"closed_form", cf.reconnection > 0.0 ? json(loop_to_reconnection_ratio(cf))
                                              : json(nullptr)}};
  }
  summary["units"] = cf.units();
  out.summary = summary;
  return out;
}

std::vector<std::string> normalize_args(std::vector<std::string> args) {
  // "verify quadrature" is accepted as "verify-quadrature"
  if (args.size() >= 2 && args[0] == "verify") {
    const std::string& sub = args[1];
    if (sub == "quadrature" || sub == "mc" || sub == "normalization" || sub == "all") {
      args[1] = "verify-" + sub;
      args.erase(args.begin());
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> args = normalize_args(raw_args);
  CLI::App app{"Vortex event rates of isotropic Gaussian random waves", "vortex_rates"};
  app.require_subcommand(1);
  Options o;
  o.workers = default_workers();
  std::map<std::string, OptionMap> maps;

  auto* moments_cmd = app.add_subcommand("moments", "Spectral moments and correlations");
  add_spectrum_options(moments_cmd, o, maps["moments"]);
  maps["moments"]["dump-matrices"] = moments_cmd->add_flag(
      "--dump-matrices", o.dump_matrices, "Include correlation and inverse matrices");

  auto* rates_cmd = app.add_subcommand("rates", "Closed-form event rates");
  add_spectrum_options(rates_cmd, o, maps["rates"]);
  maps["rates"]["sweep"] = rates_cmd->add_option(
      "--sweep", o.sweep, "Tabulate over NAME=START:STOP:N (W, c, k, omega, field-variance)");
  maps["rates"]["verify"] =
      rates_cmd->add_flag("--verify", o.verify, "Cross-check with residues and quadrature");

  auto* quad_cmd = app.add_subcommand("verify-quadrature", "Quadrature against closed forms");
  add_spectrum_options(quad_cmd, o, maps["verify-quadrature"]);

  auto* mc_cmd = app.add_subcommand("verify-mc", "Monte-Carlo estimates against closed forms");
  add_spectrum_options(mc_cmd, o, maps["verify-mc"]);
  add_seed_options(mc_cmd, o, maps["verify-mc"]);
  add_mc_options(mc_cmd, o, maps["verify-mc"]);

  auto* norm_cmd =
      app.add_subcommand("verify-normalization", "Local-form normalization identities");
  add_spectrum_options(norm_cmd, o, maps["verify-normalization"]);
  add_seed_options(norm_cmd, o, maps["verify-normalization"]);
  add_mc_options(norm_cmd, o, maps["verify-normalization"]);
  maps["verify-normalization"]["normalization-sets"] =
      norm_cmd->add_option("--normalization-sets", o.normalization_sets,
                           "Random coefficient sets per dimension (default 10)")
          ->check(CLI::Range(1, 100000));

  auto* sim_cmd = app.add_subcommand("simulate", "Count events in simulated random waves");
  add_spectrum_options(sim_cmd, o, maps["simulate"]);
  add_seed_options(sim_cmd, o, maps["simulate"]);
  add_sim_options(sim_cmd, o, maps["simulate"]);
  maps["simulate"]["events"] =
      sim_cmd->add_flag("--events", o.events, "Emit every event record");

  auto* all_cmd = app.add_subcommand("verify-all", "Every verification chain");
  add_spectrum_options(all_cmd, o, maps["verify-all"]);
  add_seed_options(all_cmd, o, maps["verify-all"]);
  add_mc_options(all_cmd, o, maps["verify-all"]);
  add_sim_options(all_cmd, o, maps["verify-all"]);
  maps["verify-all"]["simulate"] =
      all_cmd->add_flag("--simulate", o.simulate, "Include the field simulation (slow)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  const OptionMap& m = maps.at(command);

  try {
    apply_config(o, m);
    if (o.format != "json" && o.format != "csv" && o.format != "jsonl") {
      throw UsageError("format must be json, csv or jsonl");
    }
    if (o.workers < 1) throw UsageError("workers must be >= 1");
    Output result;
    bool failed = false;
    if (command == "moments") {
      result = cmd_moments(o, m);
    } else if (command == "rates") {
      result = cmd_rates(o, m, failed);
    } else if (command == "simulate") {
      result = cmd_simulate(o, m);
    } else {
      const Spectrum s = resolve_spectrum(o, m);
      std::vector<Check> checks;
      if (command == "verify-quadrature") {
        quadrature_checks(s, checks);
      } else if (command == "verify-mc") {
        mc_checks(s, o, checks);
      } else if (command == "verify-normalization") {
        normalization_checks(s, o, checks);
      } else {
        require_seed(o);
        closed_form_checks(s, checks);
        quadrature_checks(s, checks);
        mc_checks(s, o, checks);
        normalization_checks(s, o, checks);
        if (o.simulate) simulation_checks(s, o, checks);
      }
      result = checks_output(command, s, checks);
      failed = !result.summary["passed"].get<bool>();
    }
    if (o.output.empty()) {
      emit(result, o.format, out);
    } else {
      std::ofstream file(o.output);
      if (!file) throw UsageError("cannot write " + o.output);
      emit(result, o.format, file);
    }
    return failed ? kCheckFailed : kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace vortex::cli
