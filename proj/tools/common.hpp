#pragma once

#include <random>
#include <string>
#include <vector>

#include "curvlab/ricci_reg.hpp"
#include "report.hpp"

namespace curvlab::cli {

using Rng = std::mt19937_64;

inline Vec uniform_vector(Rng& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (auto& c : v) c = u(rng);
  return v;
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + format_number(x);
  return out;
}

inline double positive(ExperimentConfig& cfg, const std::string& key, double def) {
  const double v = cfg.get_double(key, def);
  if (!(v > 0)) throw InputError(key + " must be positive");
  return v;
}

inline std::vector<double> increasing(ExperimentConfig& cfg, const std::string& key, const std::string& def) {
  const auto v = cfg.get_doubles(key, def);
  if (v.empty()) throw InputError(key + " is empty");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0) || (i && v[i] <= v[i - 1])) throw InputError(key + " must be positive and increasing");
  return v;
}

/// Test vectors from a list of specs; "lowest:n" expands to the n lowest stored modes.
inline std::vector<VectorSpec> resolve_vectors(const std::vector<std::string>& specs, const TruncatedGroupModel& model,
                                               int direction = 0) {
  std::vector<VectorSpec> out;
  for (const auto& s : specs) {
    if (s.rfind("lowest:", 0) == 0) {
      int n = 0;
      try {
        n = std::stoi(s.substr(7));
      } catch (const std::exception&) {
        throw InputError("bad test vector spec '" + s + "'");
      }
      if (n < 1) throw InputError("bad test vector spec '" + s + "'");
      for (const auto& t : lowest_mode_vectors(model, n, direction)) out.push_back({{t}});
    } else {
      out.push_back(parse_vector_spec(s));
    }
  }
  return out;
}

}  // namespace curvlab::cli
