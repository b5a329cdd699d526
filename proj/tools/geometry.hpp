#pragma once

#include <optional>
#include <vector>

#include "nsp/domain.hpp"

namespace nsp::cli {

/// Identity checks for one boundary chart of a domain.
struct ChartCheck {
  int index = 0;
  bool sphere = false;
  double collar_depth = 0.0;
  double jacobian = 0.0;        ///< max |J - (AD - BC)| / |J| over the default map
  double orthonormality = 0.0;  ///< max deviation of (z_xi, z_zeta / |z_zeta|, e1, e2, n) from an oriented orthonormal frame
  std::vector<double> frenet_steps;
  std::vector<double> frenet_errors;       ///< central-difference Frenet residuals per step
  std::vector<int> chain_nodes;
  std::vector<double> chain_rule_errors;   ///< max |inverse coefficients * Jacobian - I| per map resolution
  std::optional<double> commutator;        ///< commutator residual of a trigonometric test field
};

/// Observed orders between successive entries (halved steps); nullopt when
/// the coarse error is already at round-off.
std::vector<std::optional<double>> observed_orders(const std::vector<double>& errors);

std::vector<ChartCheck> geometry_check(const DomainSpec& spec);

}  // namespace nsp::cli
