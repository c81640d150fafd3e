#pragma once

// Calibrated bound constants, read from a JSON file.

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace lws {

struct Constants {
  double c1 = 0;    // search cost / lg w
  double c2 = 0;    // insert or delete cost / log2(n+2)
  double c3 = 0;    // skip-splay access cost / log2(n+2)
  double c3p = 0;   // doubled access: multiplier of (log2 log2(n+2) + 1) lg w
  double c3pp = 0;  // doubled access: additive term
  double amortized_threshold = 10;
};

inline Constants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constants file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed constants file " + path + ": " + e.what());
  }
  Constants c;
  try {
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.c3 = j.at("c3").get<double>();
    c.c3p = j.at("c3p").get<double>();
    c.c3pp = j.at("c3pp").get<double>();
    c.amortized_threshold = j.value("amortized_threshold", 10.0);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("constants file " + path + ": " + e.what());
  }
  return c;
}

/// $LWS_CONSTANTS if set, else the path baked in at build time.
inline std::string constants_path() {
  if (const char* env = std::getenv("LWS_CONSTANTS"); env != nullptr && *env != '\0') return env;
#ifdef LWS_CONSTANTS_FILE
  return LWS_CONSTANTS_FILE;
#else
  return "config/constants.json";
#endif
}

}  // namespace lws
