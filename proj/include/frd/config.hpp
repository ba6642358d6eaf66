#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frd/elliptic.hpp"

namespace frd {

struct GeneratorSpec {
  std::string type = "laplacian";  // laplacian | diagonal | random | file
  std::vector<double> diag;        // diagonal type: per-axis gradient coefficients
  std::uint64_t seed = 0;          // random type
  std::string path;                // file type
};

/// Validated run configuration; every reader rejects a bad document with one
/// diagnostic naming the violated constraint.
struct RunConfig {
  int L = 3, N = 2, d = 2, m = 1;
  std::vector<MultiIndex> multi_indices;  // empty = gradients only
  double omega0 = 0.5, Omega0 = 2.0;
  GeneratorSpec generator;
  std::vector<GeneratorSpec> ensemble;
  std::string kind = "base";  // base | improved | final
  int n = 1, ntilde = 3;
  int scale = 1;              // sample/renorm scale k
  std::uint64_t seed = 1;
  int sample_count = 10000;
  std::string out_dir = "out";
  double tol_scale = 1.0;
  int workers = 1;
  std::vector<int> sweep_N = {2, 3, 4};

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);

  TorusGeometry geometry() const;
  TorusGeometry geometry_for(int Nother) const;
  MultiIndexSet mset() const;
  Generator make_generator(const GeneratorSpec& spec) const;
  Generator main_generator() const { return make_generator(generator); }
  /// Ensemble for constant estimation; falls back to a default family around
  /// the main generator when none is configured.
  std::vector<Generator> make_ensemble() const;
};

}  // namespace frd
