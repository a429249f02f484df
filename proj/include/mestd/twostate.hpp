#pragma once

#include <string_view>

#include "mestd/model.hpp"
#include "mestd/solver.hpp"

namespace mestd {

/// Which side of the projection interval the optimal base-layer distortion hit.
enum class ActiveBound {
  Interior,  // both layers carry rate
  BaseOnly,  // D1 at its lower bound: all rate in the base layer
  TopOnly,   // D1 at its upper bound: all rate in the top layer
};

constexpr std::string_view to_string(ActiveBound b) {
  switch (b) {
    case ActiveBound::Interior: return "Interior";
    case ActiveBound::BaseOnly: return "BaseOnly";
    case ActiveBound::TopOnly: return "TopOnly";
  }
  return "Unknown";
}

struct TwoStateSolution {
  double d1 = 0.0;
  double d2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double expected_distortion = 0.0;
  ActiveBound active_bound = ActiveBound::Interior;

  // Projection interval and unconstrained stationary point for D1.
  double d1_lower = 0.0;
  double d1_upper = 0.0;
  double d1_stationary = 0.0;
};

/// Closed-form optimum for two fading states: D1 is the stationary point of
/// p1 D1 + p2 D2(D1) along the Pareto curve, projected onto its feasible
/// interval; D2 follows from the curve.
TwoStateSolution solve_two_state(const DiscreteFading& fading, const SourceModel& src);

/// The closed-form point as a LayeredSolution with duals recovered from
/// stationarity, for certification with kkt_certify.
LayeredSolution two_state_as_layered(const TwoStateSolution& sol, const DiscreteFading& fading,
                                     const SourceModel& src);

}  // namespace mestd
