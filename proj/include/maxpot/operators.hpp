#pragma once

#include "maxpot/convolution.hpp"
#include "maxpot/field_math.hpp"
#include "maxpot/grid.hpp"
#include "maxpot/sphere.hpp"

namespace maxpot {

/// Finite geometric set of truncation radii standing in for sup over t > 0.
struct RadiusLadder {
    double t_min = 0.0;
    double t_max = 0.0;
    double ratio = 0.0;
    std::vector<double> radii;

    static RadiusLadder geometric(double t_min, double t_max, double ratio);
    /// t_min = grid spacing, t_max = box diameter, ratio = 2^(1/4).
    static RadiusLadder defaults(const Grid& grid);
};

/// (f * Phi_t)(x) = integral over |x-z| >= t of f(z) . K~(x-z) dz.
Field truncated_potential(const Field& f, const KernelSpec& spec, double t,
                          const TruncationPolicy& policy, ConvMethod method = ConvMethod::Fft);

/// A*_Omega f = max over the ladder of |f * Phi_t|.
Field maximal_potential(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                        const TruncationPolicy& policy, ConvMethod method = ConvMethod::Fft);

/// I_1 g = integral of g(z) |x-z|^{1-n} dz. The cell at z = x contributes
/// g(x) * n*omega_n * r_h with r_h = (h^n/omega_n)^{1/n}, the radius of the
/// volume-equivalent ball.
Field riesz_potential(const Field& g, ConvMethod method = ConvMethod::Fft);

/// integral over |x-z| >= t of f(z) K(x-z) dz with K homogeneous of degree -n.
Field truncated_singular(const Field& f, const KernelSpec& spec, double t,
                         const TruncationPolicy& policy, ConvMethod method = ConvMethod::Fft);

/// T*_Omega-style max over the ladder of |truncated_singular|.
Field maximal_singular(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                       const TruncationPolicy& policy, ConvMethod method = ConvMethod::Fft);

/// Convolution with the surface measure mu_t of the gradient decomposition:
/// out(x) = sum_i int_{S(0,t)} f_i(x-y) Omega_i(y/|y|) (y/|y|) dsigma(y) / t^{n-1},
/// an n-component field.
Field surface_convolution(const Field& f, const SphereSymbol& symbol, double t,
                          const SphereQuadrature& quad);

/// f * grad Phi_t = truncated convolution with grad K~ plus the surface term.
Field grad_truncated_potential(const Field& f, const KernelSpec& spec, double t,
                               const TruncationPolicy& policy, const SphereQuadrature& quad,
                               ConvMethod method = ConvMethod::Fft);

/// T* f = max over the ladder of |f * grad Phi_t| (Euclidean norm).
Field grad_majorant(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                    const TruncationPolicy& policy, const SphereQuadrature& quad,
                    ConvMethod method = ConvMethod::Fft);

/// Mean of f over the sphere S(x, t).
Field spherical_average(const Field& f, double t, const SphereQuadrature& quad);

/// use_abs = true: max over the ladder of the spherical average of |f|.
/// use_abs = false: max over the ladder of |spherical average of f|.
Field spherical_maximal(const Field& f, const RadiusLadder& ladder, const SphereQuadrature& quad,
                        bool use_abs);

/// Spherical maximal function through the gradient representation:
/// (1/(n omega_n)) A*_Omega(grad f) with Omega(z) = z.
Field spherical_via_gradient(const Field& f, const RadiusLadder& ladder,
                             const TruncationPolicy& policy, ConvMethod method = ConvMethod::Fft);

/// Kernel-lattice functions for a spec component; shared with analysis code.
TruncatedConvolver::KernelFn kernel_component_fn(const KernelSpec& spec, int comp);
TruncatedConvolver::KernelFn grad_kernel_component_fn(const KernelSpec& spec, int comp, int axis);

}  // namespace maxpot
