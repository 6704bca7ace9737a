#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kite {

// Symmetric probability kernel supported on [-1, 1], with the constants the
// quadrature tolerances depend on.
struct KernelSpec {
  const char* name = "";
  double (*eval)(double) = nullptr;
  double lipschitz = 0.0;  // L_K on [-1, 1]
  double sup_bound = 0.0;
};

inline const KernelSpec& epanechnikov() {
  static const KernelSpec spec{
      "epanechnikov",
      [](double u) { return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; },
      1.5, 0.75};
  return spec;
}

inline const KernelSpec& biweight() {
  static const KernelSpec spec{
      "biweight",
      [](double u) {
        if (std::abs(u) > 1.0) return 0.0;
        const double t = 1.0 - u * u;
        return (15.0 / 16.0) * t * t;
      },
      1.45, 15.0 / 16.0};
  return spec;
}

inline const KernelSpec& triangular() {
  static const KernelSpec spec{
      "triangular",
      [](double u) { return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : 0.0; },
      1.0, 1.0};
  return spec;
}

inline const KernelSpec& kernel_by_name(std::string_view name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "biweight") return biweight();
  if (name == "triangular") return triangular();
  throw std::invalid_argument("kernel_by_name: unknown kernel '" + std::string(name) + "'");
}

}  // namespace kite
