#pragma once

#include <utility>
#include <vector>

#include "oracles.hpp"
#include "queuechan/pmf.hpp"

namespace testhelpers {

/// Adapter: stored support of a Pmf as oracle (t, mass) points.
inline oracles::Points points_of(const queuechan::Pmf& p) {
  oracles::Points pts;
  for (std::size_t i = 0; i < p.masses().size(); ++i)
    pts.emplace_back(p.offset() + static_cast<std::int64_t>(i), p.masses()[i]);
  return pts;
}

inline oracles::Points points_of(const queuechan::ParametricDist& d, double tail_eps) {
  return points_of(queuechan::materialize(d, tail_eps));
}

}  // namespace testhelpers
