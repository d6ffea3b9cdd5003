#pragma once

#include <string>

#include "vortex/gaussian_model.hpp"
#include "vortex/spectra.hpp"

namespace vortex {

/// Parses {"dimension": 2|3, "kind": "...", params...}. Kinds and parameters:
///   monochromatic, monochromatic_modulus: k0, omega0
///   blackbody: W, c
///   ring_mixture: rings = [[weight, k, omega], ...]
///   tabulated: omega_grid, k_grid, phi (phi[i][j] at omega_grid[i], k_grid[j])
///   special_dispersion: k0, c
/// Optional "field_variance" (default 1). Hyphens in kind names are accepted.
/// Throws InvalidInput on malformed input.
Spectrum spectrum_from_json(const std::string& text);
Spectrum load_spectrum_file(const std::string& path);
std::string spectrum_to_json(const Spectrum& spectrum);

/// Row-major correlation and inverse matrices with the variable ordering.
std::string matrices_json(const CorrelationModel2D& model);
std::string matrices_json(const CorrelationModel3D& model);

}  // namespace vortex
