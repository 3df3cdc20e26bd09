#pragma once

#include "robustmean/types.hpp"

namespace robustmean {

struct TransportResult {
  Matrix flow;  // supply.size() x demand.size()
  double cost = 0.0;
};

/// Balanced transportation problem: ship `supply` to `demand` at minimal
/// total sum(flow .* cost). Successive shortest paths with Dijkstra on reduced
/// costs (dense graph). Supplies and demands are rescaled to sum to 1 each;
/// costs must be nonnegative. Throws Errc::invalid_argument otherwise.
TransportResult solve_transport(const Vector& supply, const Vector& demand, const Matrix& cost);

}  // namespace robustmean
