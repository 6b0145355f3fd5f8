#pragma once

#include <functional>
#include <string>
#include <vector>

#include "maxpot/common.hpp"

namespace maxpot {

/// Symbol Omega on the unit sphere S^{n-1}, possibly vector-valued.
/// eval depends only on the direction of its argument.
struct SphereSymbol {
    int dim = 2;
    int components = 1;
    std::string catalog_id;
    /// Writes Omega(u) for a unit vector u into out[0..m-1].
    std::function<void(const Vec&, double*)> eval;
    /// Optional analytic gradient of x -> Omega(x/|x|) away from 0; writes an
    /// m x n row-major matrix. Empty means the numeric path is used.
    std::function<void(const Vec&, double*)> grad_extension;
    double sup_norm_bound = 0.0;
};

/// Quadrature on S^{n-1}: n=2 is the equispaced trapezoid rule in angle,
/// n=3 is Gauss-Legendre in cos(theta) times trapezoid in phi. Weights sum
/// to the surface area n*omega_n.
struct SphereQuadrature {
    int dim = 2;
    int order = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

SphereQuadrature sphere_quadrature(int dim, int order);

/// Builds a catalog symbol; checks the sup_norm_bound against quadrature
/// nodes at construction.
///
/// Catalog: one (m=1), identity (m=n, Omega(z)=z), coordinate (m=1,
/// Omega(z)=z_j, param axis), harmonic2 (m=1, z1^2-z2^2), exp_centered
/// (m=1, exp(z1) minus its spherical mean).
SphereSymbol make_symbol(const std::string& id, int dim, int axis = 0);

std::vector<std::string> symbol_catalog_names();

enum class KernelDegree {
    Potential,  // -(n-1): integrable near 0, no zero-mean requirement
    Singular,   // -n: requires zero mean of the symbol
};

/// Homogeneous kernel derived from a symbol. Singular kernels check the
/// zero-mean condition at construction and reject symbols whose spherical
/// integral exceeds 1e-8 in any component.
struct KernelSpec {
    SphereSymbol symbol;
    KernelDegree degree = KernelDegree::Potential;

    static KernelSpec potential(SphereSymbol symbol);
    static KernelSpec singular(SphereSymbol symbol, const SphereQuadrature& quad);

    int dim() const { return symbol.dim; }
    int components() const { return symbol.components; }
};

/// K~(x) = Omega(x/|x|) |x|^{-(n-1)}. Degree must be Potential; x != 0.
void ktilde_eval(const KernelSpec& spec, const Vec& x, double* out);

/// K(x) = Omega(x/|x|) |x|^{-n}. Degree must be Singular; x != 0.
void ksing_eval(const KernelSpec& spec, const Vec& x, double* out);

/// Pointwise gradient of K~, an m x n row-major matrix, homogeneous of
/// degree -n. Uses the symbol's analytic gradient when present, otherwise
/// homogeneity-aware central differences with relative step 1e-5.
void grad_ktilde(const KernelSpec& spec, const Vec& x, double* out);

/// Integral of Omega over S^{n-1} by quadrature, m values.
std::vector<double> symbol_integral(const SphereSymbol& symbol, const SphereQuadrature& quad);

/// Dirac coefficients of the distributional gradient of K~:
/// c[i][j] = integral over S^{n-1} of K~_i(x) x_j/|x| dsigma = int Omega_i(u) u_j.
struct BoundaryConstants {
    int components = 1;
    int dim = 2;
    std::vector<double> c;  // row-major m x n
    double entry(int i, int j) const { return c[static_cast<std::size_t>(i) * dim + j]; }
};

BoundaryConstants boundary_constants(const KernelSpec& spec, const SphereQuadrature& quad);

/// Max absolute entry of the spherical integral of grad K~ (zero for every
/// C^1 symbol; this is the testable form of that identity).
double grad_zero_mean_residual(const KernelSpec& spec, const SphereQuadrature& quad);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace maxpot
