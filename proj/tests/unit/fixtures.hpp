#pragma once

#include <memory>

#include "frd/decomposition.hpp"

namespace frd::testing {

/// Shared desk-scale fixtures, built once per test binary.
struct Desk {
  TorusGeometry g2{3, 2, 2, 1};
  TorusGeometry g3{3, 3, 2, 1};
  MultiIndexSet ms = MultiIndexSet::gradients(2);
  Generator lap = laplacian_generator(ms, 1, 0.5, 2.0);
  Generator aniso = diagonal_generator(ms, 1, {1.0, 0.6}, 0.5, 2.0);
  std::unique_ptr<BaseBuilder> bl3, ba3;
  Decomposition lap_base3, aniso_base3;
  Decomposition lap_nt3, lap_n3, aniso_nt3;
  double K3 = 0;
  Decomposition final3;

  Desk() {
    bl3 = std::make_unique<BaseBuilder>(g3, lap, 0.0, 2);
    ba3 = std::make_unique<BaseBuilder>(g3, aniso, 0.0, 2);
    lap_base3 = bl3->build();
    aniso_base3 = ba3->build();
    lap_nt3 = improved_decomposition(lap_base3, 3);
    lap_n3 = improved_decomposition(lap_base3, 1);
    aniso_nt3 = improved_decomposition(aniso_base3, 3);
    K3 = std::max(estimate_K(aniso_nt3, lap_nt3, 3), estimate_K(lap_nt3, lap_nt3, 3));
    final3 = final_decomposition(aniso_nt3, lap_nt3, lap_n3, K3);
  }
};

inline const Desk& desk() {
  static Desk d;
  return d;
}

}  // namespace frd::testing
