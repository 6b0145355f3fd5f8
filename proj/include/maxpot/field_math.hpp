#pragma once

#include <limits>
#include <utility>

#include "maxpot/grid.hpp"

namespace maxpot {

/// Midpoint-rule L^p norm, (sum |f(node)|^p h^n)^(1/p), with |f| the
/// Euclidean norm across components. p = infinity gives the max norm.
double lp_norm(const Field& f, double p);

/// Max over nodes of the Euclidean magnitude.
double max_abs(const Field& f);

/// Central differences in the interior, one-sided at the box boundary.
/// Input must be scalar; output has n components.
Field fd_gradient(const Field& f);

/// Multilinear interpolation with zero extension outside the box. Writes
/// one value per component into out.
void interpolate(const Field& f, const Vec& x, double* out);

/// Scalar convenience overload.
double interpolate_scalar(const Field& f, const Vec& x);

/// (‖f‖_{p*}, ‖grad f‖_p); their sum is the homogeneous Sobolev norm.
std::pair<double, double> sobolev_seminorm_pair(const Field& f, const NormSettings& settings);

/// Pointwise Euclidean magnitude, scalar output.
Field magnitude_field(const Field& f);

Field scaled(const Field& f, double factor);
Field added(const Field& f, const Field& g);

}  // namespace maxpot
