#pragma once

#include "p1pairs/tailmod.hpp"

namespace p1pairs {

/// Degree d-1 component of a map a -> b whose degree-d component is x_above.
QMat extend_map_down(const TailModule& a, const TailModule& b, int d, const QMat& x_above);

/// Degree d+1 component of a map a -> b whose degree-d component is x, or
/// nullopt when no compatible extension exists.
std::optional<QMat> extend_map_up(const TailModule& a, const TailModule& b, int d, const QMat& x);

}  // namespace p1pairs
