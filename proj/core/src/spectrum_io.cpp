#include "vortex/spectrum_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "vortex/error.hpp"

namespace vortex {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string normalize_kind(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InvalidInput(std::string("spectrum is missing \"") + key + "\"");
  }
  if (!j.at(key).is_number()) throw InvalidInput(std::string("\"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw InvalidInput(std::string("spectrum needs array \"") + key + "\"");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw InvalidInput(std::string("\"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Spectrum spectrum_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("spectrum JSON does not parse: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("spectrum JSON must be an object");
  if (!j.contains("dimension") || !j.at("dimension").is_number_integer()) {
    throw InvalidInput("spectrum needs integer \"dimension\"");
  }
  const Dimension dim = dimension_from_int(j.at("dimension").get<int>());
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw InvalidInput("spectrum needs string \"kind\"");
  }
  const std::string kind = normalize_kind(j.at("kind").get<std::string>());
  const double f2 = number(j, "field_variance", 1.0);

  SpectrumKind k;
  if (kind == "monochromatic") {
    k = Monochromatic{number(j, "k0"), number(j, "omega0")};
  } else if (kind == "monochromatic_modulus") {
    k = MonochromaticModulus{number(j, "k0"), number(j, "omega0")};
  } else if (kind == "blackbody") {
    k = Blackbody{number(j, "W"), number(j, "c")};
  } else if (kind == "special_dispersion") {
    k = SpecialDispersion{number(j, "k0"), number(j, "c")};
  } else if (kind == "ring_mixture") {
    if (!j.contains("rings") || !j.at("rings").is_array()) {
      throw InvalidInput("ring_mixture needs array \"rings\"");
    }
    RingMixture rm;
    for (const auto& t : j.at("rings")) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number() ||
          !t[2].is_number()) {
        throw InvalidInput("each ring must be a [weight, k, omega] triple");
      }
      rm.rings.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    k = rm;
  } else if (kind == "tabulated") {
    Tabulated tb;
    tb.omega_grid = number_array(j, "omega_grid");
    tb.k_grid = number_array(j, "k_grid");
    if (!j.contains("phi") || !j.at("phi").is_array()) {
      throw InvalidInput("tabulated needs 2D array \"phi\"");
    }
    for (const auto& row : j.at("phi")) {
      if (!row.is_array()) throw InvalidInput("\"phi\" rows must be arrays");
      std::vector<double> r;
      for (const auto& v : row) {
        if (!v.is_number()) throw InvalidInput("\"phi\" must hold numbers");
        r.push_back(v.get<double>());
      }
      tb.phi.push_back(std::move(r));
    }
    k = tb;
  } else {
    throw InvalidInput("unknown spectrum kind \"" + kind + "\"");
  }
  return Spectrum(std::move(k), dim, f2);
}

Spectrum load_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open spectrum file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return spectrum_from_json(ss.str());
}

std::string spectrum_to_json(const Spectrum& spectrum) {
  json j;
  j["dimension"] = to_int(spectrum.dimension());
  j["kind"] = spectrum.kind_name();
  j["field_variance"] = spectrum.field_variance();
  std::visit(Overloaded{
                 [&](const Monochromatic& s) {
                   j["k0"] = s.k0;
                   j["omega0"] = s.omega0;
                 },
                 [&](const MonochromaticModulus& s) {
                   j["k0"] = s.k0;
                   j["omega0"] = s.omega0;
                 },
                 [&](const Blackbody& s) {
                   j["W"] = s.W;
                   j["c"] = s.c;
                 },
                 [&](const SpecialDispersion& s) {
                   j["k0"] = s.k0;
                   j["c"] = s.c;
                 },
                 [&](const RingMixture& s) {
                   json rings = json::array();
                   for (const Ring& r : s.rings) rings.push_back({r.weight, r.k, r.omega});
                   j["rings"] = rings;
                 },
                 [&](const Tabulated& s) {
                   j["omega_grid"] = s.omega_grid;
                   j["k_grid"] = s.k_grid;
                   j["phi"] = s.phi;
                 },
             },
             spectrum.kind());
  return j.dump();
}

std::string matrices_json(const CorrelationModel2D& model) {
  json j;
  j["dimension"] = 2;
  j["ordering"] = {"f", "f_t", "f_xx", "g", "g_t", "g_xx"};
  j["corr"] = matrix_json(model.corr);
  j["inverse"] = matrix_json(model.gamma);
  j["gamma_x"] = model.gamma_x;
  j["degenerate"] = model.degenerate;
  return j.dump();
}

std::string matrices_json(const CorrelationModel3D& model) {
  json j;
  j["dimension"] = 3;
  j["ordering"] = {"f", "f_t", "f_xx", "f_yy", "g", "g_t", "g_xx", "g_yy"};
  j["corr"] = matrix_json(model.corr);
  j["inverse"] = matrix_json(model.Gamma);
  j["Gamma_x"] = model.Gamma_x;
  j["Gamma_xy"] = model.Gamma_xy;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["a"] = num(model.a);
  j["b"] = num(model.b);
  j["D"] = num(model.D);
  j["Q"] = num(model.Q);
  j["degenerate"] = model.degenerate;
  return j.dump();
}

}  // namespace vortex
