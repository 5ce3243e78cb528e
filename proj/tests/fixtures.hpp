#pragma once

// Reference values computed by an independent pure-Python Fraction
// implementation of the same formulas (no shared code with this library).

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hsv/scalar.hpp"
#include "hsv/verify.hpp"

namespace fixtures {

inline const nlohmann::json& reference() {
  static const nlohmann::json js = [] {
    std::ifstream f(std::string(HSV_TEST_DATA) + "/reference_values.json");
    return nlohmann::json::parse(f);
  }();
  return js;
}

inline hsv::Scalar scalar(const nlohmann::json& v) { return hsv::Scalar::parse(v.get<std::string>()); }

// Runs body until it completes without hitting a singular draw; the body
// must consume the sampler so each retry sees fresh parameters.
template <class F>
void resampled(F&& body, int cap = 50) {
  for (int attempt = 0; attempt < cap; ++attempt) {
    try {
      body();
      return;
    } catch (const hsv::Singular&) {
    }
  }
  throw std::runtime_error("resample cap reached");
}

}  // namespace fixtures
