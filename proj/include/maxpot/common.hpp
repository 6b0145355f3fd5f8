#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace maxpot {

// Points and offsets in R^n, n <= 3. Unused trailing entries stay zero so
// 2-d and 3-d code paths share the same arithmetic.
using Vec = std::array<double, 3>;

inline Vec vec(double x, double y, double z = 0.0) { return {x, y, z}; }

inline double dot(const Vec& a, const Vec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Volume of the unit ball: omega_2 = pi, omega_3 = 4*pi/3.
double unit_ball_volume(int dim);

/// Surface area of the unit sphere, n * omega_n.
double unit_sphere_area(int dim);

/// Worker count for node-parallel loops. Capped by the MAXPOT_THREADS
/// environment variable; defaults to the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [begin, end). Each index is computed by exactly one
/// worker and writes only its own slots, so outputs are bit-identical for
/// every worker count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

/// Block variant: fn(lo, hi) over disjoint ranges. Cheaper than the
/// per-index form for tight loops.
void parallel_for_blocked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn);

/// Fixed-order pairwise summation. The reduction tree depends only on the
/// length, never on the worker count.
double pairwise_sum(std::span<const double> values);

}  // namespace maxpot
