#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "maxpot/grid.hpp"

namespace maxpot {

enum class ConvMethod {
    Fft,     // zero-padded linear convolution, the production path
    Direct,  // O(nodes^2) reference path over the same kernel lattice
};

/// Discretization of the indicator chi_{|x-z| >= t} on kernel cells.
/// Center-indicator tests the cell center only; overlap-weighted subsamples
/// cells straddling the truncation sphere.
struct TruncationPolicy {
    enum class Mode { CenterIndicator, OverlapWeighted };
    Mode mode = Mode::OverlapWeighted;
    int subsamples = 4;

    static TruncationPolicy center_indicator() { return {Mode::CenterIndicator, 0}; }
    static TruncationPolicy overlap(int subsamples = 4) { return {Mode::OverlapWeighted, subsamples}; }
};

/// Fraction of the h-cell centered at offset d that lies outside B(0, t).
double truncation_weight(const Vec& d, double r, double t, double h, int dim,
                         const TruncationPolicy& policy);

/// Discrete convolution of an m-component field with a family of kernels,
/// summed over components:
///
///   out(x) = sum_i sum_z f_i(z) k_i(x - z) w_t(x - z) h^n
///
/// The kernel lattice (k_i at cell centers times cell volume, zero offset
/// replaced by center_value) is sampled once per convolver; truncation
/// re-weights it per radius. Pass t <= 0 for the untruncated sum (the only
/// case where center_value enters). The FFT path pads every axis to at
/// least twice the node count, so the circular product reproduces the
/// linear convolution exactly on the output window.
class TruncatedConvolver {
  public:
    using KernelFn = std::function<double(const Vec&)>;

    TruncatedConvolver(const Grid& grid, std::vector<KernelFn> kernel_components,
                       double center_value, const TruncationPolicy& policy);
    ~TruncatedConvolver();
    TruncatedConvolver(const TruncatedConvolver&) = delete;
    TruncatedConvolver& operator=(const TruncatedConvolver&) = delete;

    int components() const;
    const Grid& grid() const;

    Field apply(const Field& f, double t, ConvMethod method = ConvMethod::Fft) const;

    /// max over the given radii of |apply(f, t)| per node. Computes the
    /// field spectrum once and streams kernels over the radii.
    Field apply_abs_max(const Field& f, std::span<const double> radii,
                        ConvMethod method = ConvMethod::Fft) const;

    /// Variant keeping every per-radius field.
    std::vector<Field> apply_all(const Field& f, std::span<const double> radii,
                                 ConvMethod method = ConvMethod::Fft) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Smallest 5-smooth integer >= n (FFT-friendly padding size).
int next_fast_size(int n);

}  // namespace maxpot
