#include "robustmean/min_cost_flow.hpp"

#include <algorithm>
#include <limits>

#include "robustmean/error.hpp"

namespace robustmean {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZero = 1e-15;

Vector normalized(const Vector& v, const char* what) {
  if (v.size() == 0) throw Error(Errc::invalid_argument, std::string(what) + " is empty");
  if ((v.array() < 0.0).any() || !v.allFinite()) {
    throw Error(Errc::invalid_argument, std::string(what) + " must be finite and nonnegative");
  }
  const double total = v.sum();
  if (total <= 0.0) throw Error(Errc::invalid_argument, std::string(what) + " has zero mass");
  return v / total;
}

}  // namespace

TransportResult solve_transport(const Vector& supply_in, const Vector& demand_in, const Matrix& cost) {
  const Index m = supply_in.size();
  const Index k = demand_in.size();
  if (cost.rows() != m || cost.cols() != k) {
    throw Error(Errc::dimension_mismatch, "cost matrix must be |supply| x |demand|");
  }
  if ((cost.array() < 0.0).any() || !cost.allFinite()) {
    throw Error(Errc::invalid_argument, "transport costs must be finite and nonnegative");
  }
  Vector supply = normalized(supply_in, "supply");
  Vector demand = normalized(demand_in, "demand");

  // Nodes 0..m-1 are sources, m..m+k-1 are sinks.
  const Index v_count = m + k;
  TransportResult out;
  out.flow = Matrix::Zero(m, k);
  Vector potential = Vector::Zero(v_count);
  std::vector<double> dist(static_cast<std::size_t>(v_count));
  std::vector<Index> prev(static_cast<std::size_t>(v_count));
  std::vector<bool> done(static_cast<std::size_t>(v_count));

  const long max_rounds = 4L * static_cast<long>(v_count) * static_cast<long>(v_count) + 16;
  for (long round = 0;; ++round) {
    if (supply.sum() <= 1e-13) break;
    if (round > max_rounds) throw Error(Errc::internal, "transport solver did not terminate");

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), Index{-1});
    std::fill(done.begin(), done.end(), false);
    for (Index i = 0; i < m; ++i) {
      if (supply(i) > kZero) dist[static_cast<std::size_t>(i)] = 0.0;
    }
    for (;;) {
      Index u = -1;
      double best = kInf;
      for (Index v = 0; v < v_count; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        if (!done[vi] && dist[vi] < best) {
          best = dist[vi];
          u = v;
        }
      }
      if (u < 0) break;
      done[static_cast<std::size_t>(u)] = true;
      if (u < m) {
        for (Index j = 0; j < k; ++j) {
          const double rc = std::max(0.0, cost(u, j) + potential(u) - potential(m + j));
          auto& d = dist[static_cast<std::size_t>(m + j)];
          if (best + rc < d) {
            d = best + rc;
            prev[static_cast<std::size_t>(m + j)] = u;
          }
        }
      } else {
        const Index j = u - m;
        for (Index i = 0; i < m; ++i) {
          if (out.flow(i, j) <= kZero) continue;
          const double rc = std::max(0.0, -cost(i, j) + potential(u) - potential(i));
          auto& d = dist[static_cast<std::size_t>(i)];
          if (best + rc < d) {
            d = best + rc;
            prev[static_cast<std::size_t>(i)] = u;
          }
        }
      }
    }

    Index target = -1;
    double target_dist = kInf;
    for (Index j = 0; j < k; ++j) {
      const double d = dist[static_cast<std::size_t>(m + j)];
      if (demand(j) > kZero && d < target_dist) {
        target_dist = d;
        target = m + j;
      }
    }
    if (target < 0) break;

    for (Index v = 0; v < v_count; ++v) potential(v) += std::min(dist[static_cast<std::size_t>(v)], target_dist);

    double push = demand(target - m);
    Index v = target;
    while (prev[static_cast<std::size_t>(v)] >= 0) {
      const Index u = prev[static_cast<std::size_t>(v)];
      if (u >= m) push = std::min(push, out.flow(v, u - m));
      v = u;
    }
    const Index source = v;
    push = std::min(push, supply(source));

    v = target;
    while (prev[static_cast<std::size_t>(v)] >= 0) {
      const Index u = prev[static_cast<std::size_t>(v)];
      if (u < m) {
        out.flow(u, v - m) += push;
      } else {
        out.flow(v, u - m) = std::max(0.0, out.flow(v, u - m) - push);
      }
      v = u;
    }
    supply(source) -= push;
    demand(target - m) -= push;
  }

  out.cost = (out.flow.array() * cost.array()).sum();
  return out;
}

}  // namespace robustmean
