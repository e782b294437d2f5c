#pragma once

#include <cstddef>

#include "qubus/hybrid_state.hpp"

namespace qubus {

/// Beam-splitter loss attached to a conditional displacement: the bus
/// receives sqrt(1 - eta^2) of the displacement, a fresh environment mode
/// receives eta of it.
struct LossModel {
  double eta = 0.0;
  bool compensate = false;

  double transmission() const;
  double reflection() const { return eta; }
};

/// Throws InvalidEta unless 0 <= eta < 1.
void check_eta(double eta);

/// D(beta s) split between the bus and a new environment branch.
HybridState apply_lossy_cond_disp(const HybridState& state, Complex beta, std::size_t qubit,
                                  double eta);

/// beta' with sqrt(1 - eta^2) beta' = beta_target.
Complex compensate_amplitude(Complex beta_target, double eta);

}  // namespace qubus
