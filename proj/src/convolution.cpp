#include "maxpot/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace maxpot {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwRealDeleter {
    void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwRealDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwComplexDeleter>;

RealBuf alloc_real(std::size_t n) { return RealBuf(fftw_alloc_real(n)); }
ComplexBuf alloc_complex(std::size_t n) { return ComplexBuf(fftw_alloc_complex(n)); }

}  // namespace

int next_fast_size(int n) {
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

double truncation_weight(const Vec& d, double r, double t, double h, int dim,
                         const TruncationPolicy& policy) {
    if (t <= 0.0) return 1.0;
    if (policy.mode == TruncationPolicy::Mode::CenterIndicator) return r >= t ? 1.0 : 0.0;
    const double crit = 0.5 * h * std::sqrt(static_cast<double>(dim));
    if (r >= t + crit) return 1.0;
    if (r <= t - crit) return 0.0;
    const int s = std::max(2, policy.subsamples);
    int outside = 0, total = 0;
    std::array<int, 3> k{0, 0, 0};
    const int s2 = dim == 3 ? s : 1;
    for (k[0] = 0; k[0] < s; ++k[0]) {
        for (k[1] = 0; k[1] < s; ++k[1]) {
            for (k[2] = 0; k[2] < s2; ++k[2]) {
                Vec pt = d;
                for (int a = 0; a < dim; ++a) pt[a] += ((k[a] + 0.5) / s - 0.5) * h;
                if (norm(pt) >= t) ++outside;
                ++total;
            }
        }
    }
    return static_cast<double>(outside) / total;
}

struct TruncatedConvolver::Impl {
    Grid grid;
    int m = 1;
    TruncationPolicy policy;
    std::array<int, 3> N{1, 1, 1};  // node counts
    std::array<int, 3> M{1, 1, 1};  // padded sizes
    std::size_t padded_total = 1;
    std::size_t spec_total = 1;  // complex entries of the r2c spectrum
    std::array<std::size_t, 3> pstride{0, 0, 0};

    std::vector<RealBuf> base;  // kernel lattice per component, padded layout
    RealBuf work;               // padded real scratch
    ComplexBuf kspec;           // kernel spectrum scratch
    ComplexBuf acc;             // accumulated product spectrum
    std::vector<ComplexBuf> field_spec;  // per-component field spectra
    fftw_plan plan_r2c = nullptr;
    fftw_plan plan_c2r = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (plan_r2c) fftw_destroy_plan(plan_r2c);
        if (plan_c2r) fftw_destroy_plan(plan_c2r);
    }

    std::size_t pos(int axis, int d) const {
        return static_cast<std::size_t>(d >= 0 ? d : M[axis] + d);
    }

    std::size_t lattice_slot(int d0, int d1, int d2) const {
        return pos(0, d0) * pstride[0] + pos(1, d1) * pstride[1] + pos(2, d2) * pstride[2];
    }

    /// Visits every lattice offset, parallel over the leading axis.
    void for_each_offset(const std::function<void(int, int, int, std::size_t)>& fn) const {
        const int n0 = N[0] - 1, n1 = N[1] - 1, n2 = grid.dim == 3 ? N[2] - 1 : 0;
        const std::size_t span0 = static_cast<std::size_t>(2 * n0 + 1);
        parallel_for(0, span0, [&](std::size_t i) {
            const int d0 = static_cast<int>(i) - n0;
            for (int d1 = -n1; d1 <= n1; ++d1) {
                for (int d2 = -n2; d2 <= n2; ++d2) {
                    fn(d0, d1, d2, lattice_slot(d0, d1, d2));
                }
            }
        });
    }

    void weight_kernel(int comp, double t, double* out) const {
        std::memset(out, 0, padded_total * sizeof(double));
        const double h = grid.spacing;
        const double* b = base[static_cast<std::size_t>(comp)].get();
        const TruncationPolicy pol = policy;
        const int dim = grid.dim;
        for_each_offset([&](int d0, int d1, int d2, std::size_t slot) {
            const Vec d = vec(d0 * h, d1 * h, d2 * h);
            const double r = norm(d);
            const double w = truncation_weight(d, r, t, h, dim, pol);
            out[slot] = w == 0.0 ? 0.0 : b[slot] * w;
        });
    }

    void forward(const double* src_nodes, fftw_complex* dst) {
        // Scatter the field into the zero-padded buffer, then transform.
        std::memset(work.get(), 0, padded_total * sizeof(double));
        const std::size_t nodes = grid.node_count();
        double* w = work.get();
        const Grid& g = grid;
        const auto ps = pstride;
        parallel_for_blocked(0, nodes, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t node = lo; node < hi; ++node) {
                const auto idx = g.unflatten(node);
                w[static_cast<std::size_t>(idx[0]) * ps[0] + static_cast<std::size_t>(idx[1]) * ps[1] +
                  static_cast<std::size_t>(idx[2]) * ps[2]] = src_nodes[node];
            }
        });
        fftw_execute_dft_r2c(plan_r2c, work.get(), dst);
    }

    void extract(Field& out) {
        const std::size_t nodes = grid.node_count();
        const double scale = 1.0 / static_cast<double>(padded_total);
        const double* w = work.get();
        const Grid& g = grid;
        const auto ps = pstride;
        parallel_for_blocked(0, nodes, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t node = lo; node < hi; ++node) {
                const auto idx = g.unflatten(node);
                out.data[node] = scale *
                    w[static_cast<std::size_t>(idx[0]) * ps[0] + static_cast<std::size_t>(idx[1]) * ps[1] +
                      static_cast<std::size_t>(idx[2]) * ps[2]];
            }
        });
    }

    void prepare_field(const Field& f) {
        for (int c = 0; c < m; ++c) {
            if (!field_spec[static_cast<std::size_t>(c)]) {
                field_spec[static_cast<std::size_t>(c)] = alloc_complex(spec_total);
            }
            forward(f.component(c).data(), field_spec[static_cast<std::size_t>(c)].get());
        }
    }

    /// conv at radius t using the prepared field spectra.
    void apply_prepared(double t, Field& out) {
        for (int c = 0; c < m; ++c) {
            weight_kernel(c, t, work.get());
            fftw_execute_dft_r2c(plan_r2c, work.get(), kspec.get());
            const fftw_complex* fs = field_spec[static_cast<std::size_t>(c)].get();
            fftw_complex* a = acc.get();
            const fftw_complex* k = kspec.get();
            const bool first = c == 0;
            parallel_for_blocked(0, spec_total, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    const double re = fs[i][0] * k[i][0] - fs[i][1] * k[i][1];
                    const double im = fs[i][0] * k[i][1] + fs[i][1] * k[i][0];
                    if (first) {
                        a[i][0] = re;
                        a[i][1] = im;
                    } else {
                        a[i][0] += re;
                        a[i][1] += im;
                    }
                }
            });
        }
        fftw_execute_dft_c2r(plan_c2r, acc.get(), work.get());
        extract(out);
    }

    Field apply_direct(const Field& f, double t) const {
        Field out(grid, 1);
        const double h = grid.spacing;
        const std::size_t nodes = grid.node_count();
        const int dim = grid.dim;
        // Weighted lattice, shared across output nodes.
        std::vector<std::vector<double>> g(static_cast<std::size_t>(m),
                                           std::vector<double>(padded_total, 0.0));
        for (int c = 0; c < m; ++c) {
            const double* b = base[static_cast<std::size_t>(c)].get();
            double* gc = g[static_cast<std::size_t>(c)].data();
            for_each_offset([&](int d0, int d1, int d2, std::size_t slot) {
                const Vec d = vec(d0 * h, d1 * h, d2 * h);
                const double w = truncation_weight(d, norm(d), t, h, dim, policy);
                gc[slot] = w == 0.0 ? 0.0 : b[slot] * w;
            });
        }
        parallel_for_blocked(0, nodes, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t xn = lo; xn < hi; ++xn) {
                const auto xi = grid.unflatten(xn);
                double total = 0.0;
                for (int c = 0; c < m; ++c) {
                    const double* gc = g[static_cast<std::size_t>(c)].data();
                    const double* fc = f.component(c).data();
                    std::size_t zn = 0;
                    for (int z0 = 0; z0 < N[0]; ++z0) {
                        for (int z1 = 0; z1 < N[1]; ++z1) {
                            const int n2 = grid.dim == 3 ? N[2] : 1;
                            for (int z2 = 0; z2 < n2; ++z2, ++zn) {
                                const double fv = fc[zn];
                                if (fv == 0.0) continue;
                                total += fv * gc[lattice_slot(xi[0] - z0, xi[1] - z1, xi[2] - z2)];
                            }
                        }
                    }
                }
                out.data[xn] = total;
            }
        });
        return out;
    }
};

TruncatedConvolver::TruncatedConvolver(const Grid& grid, std::vector<KernelFn> kernel_components,
                                       double center_value, const TruncationPolicy& policy)
    : impl_(std::make_unique<Impl>()) {
    if (kernel_components.empty()) throw std::invalid_argument("TruncatedConvolver: no kernels");
    Impl& im = *impl_;
    im.grid = grid;
    im.m = static_cast<int>(kernel_components.size());
    im.policy = policy;
    for (int a = 0; a < 3; ++a) im.N[a] = grid.dims[a];
    for (int a = 0; a < grid.dim; ++a) im.M[a] = next_fast_size(2 * im.N[a]);
    for (int a = grid.dim; a < 3; ++a) im.M[a] = 1;

    im.padded_total = static_cast<std::size_t>(im.M[0]) * im.M[1] * im.M[2];
    const int last = grid.dim - 1;
    std::array<int, 3> cdims = im.M;
    cdims[last] = im.M[last] / 2 + 1;
    im.spec_total = static_cast<std::size_t>(cdims[0]) * cdims[1] * cdims[2];
    im.pstride[2] = grid.dim == 3 ? 1 : 0;
    im.pstride[1] = grid.dim == 3 ? static_cast<std::size_t>(im.M[2]) : 1;
    im.pstride[0] = im.pstride[1] * static_cast<std::size_t>(im.M[1]);

    im.work = alloc_real(im.padded_total);
    im.kspec = alloc_complex(im.spec_total);
    im.acc = alloc_complex(im.spec_total);
    im.field_spec.resize(static_cast<std::size_t>(im.m));

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (grid.dim == 2) {
            im.plan_r2c = fftw_plan_dft_r2c_2d(im.M[0], im.M[1], im.work.get(), im.kspec.get(),
                                               FFTW_ESTIMATE);
            im.plan_c2r = fftw_plan_dft_c2r_2d(im.M[0], im.M[1], im.acc.get(), im.work.get(),
                                               FFTW_ESTIMATE);
        } else {
            im.plan_r2c = fftw_plan_dft_r2c_3d(im.M[0], im.M[1], im.M[2], im.work.get(),
                                               im.kspec.get(), FFTW_ESTIMATE);
            im.plan_c2r = fftw_plan_dft_c2r_3d(im.M[0], im.M[1], im.M[2], im.acc.get(),
                                               im.work.get(), FFTW_ESTIMATE);
        }
    }
    if (!im.plan_r2c || !im.plan_c2r) throw std::runtime_error("TruncatedConvolver: FFTW planning failed");

    // Sample the kernel lattice once: value at the cell center times the
    // cell volume, with the zero offset pinned to center_value.
    const double vol = grid.cell_volume();
    const double h = grid.spacing;
    for (int c = 0; c < im.m; ++c) {
        auto buf = alloc_real(im.padded_total);
        std::memset(buf.get(), 0, im.padded_total * sizeof(double));
        double* b = buf.get();
        const KernelFn& k = kernel_components[static_cast<std::size_t>(c)];
        im.for_each_offset([&](int d0, int d1, int d2, std::size_t slot) {
            if (d0 == 0 && d1 == 0 && d2 == 0) {
                b[slot] = center_value;
            } else {
                b[slot] = k(vec(d0 * h, d1 * h, d2 * h)) * vol;
            }
        });
        im.base.push_back(std::move(buf));
    }
}

TruncatedConvolver::~TruncatedConvolver() = default;

int TruncatedConvolver::components() const { return impl_->m; }
const Grid& TruncatedConvolver::grid() const { return impl_->grid; }

Field TruncatedConvolver::apply(const Field& f, double t, ConvMethod method) const {
    Impl& im = *impl_;
    if (!(f.grid == im.grid)) throw std::invalid_argument("TruncatedConvolver: grid mismatch");
    if (f.components != im.m) throw std::invalid_argument("TruncatedConvolver: component mismatch");
    if (method == ConvMethod::Direct) return im.apply_direct(f, t);
    Field out(im.grid, 1);
    im.prepare_field(f);
    im.apply_prepared(t, out);
    return out;
}

Field TruncatedConvolver::apply_abs_max(const Field& f, std::span<const double> radii,
                                        ConvMethod method) const {
    Impl& im = *impl_;
    if (radii.empty()) throw std::invalid_argument("apply_abs_max: empty radius list");
    Field out(im.grid, 1);
    Field tmp(im.grid, 1);
    bool first = true;
    if (method == ConvMethod::Fft) im.prepare_field(f);
    for (double t : radii) {
        if (method == ConvMethod::Fft) {
            im.apply_prepared(t, tmp);
        } else {
            tmp = im.apply_direct(f, t);
        }
        if (first) {
            parallel_for_blocked(0, out.nodes(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) out.data[i] = std::abs(tmp.data[i]);
            });
            first = false;
        } else {
            parallel_for_blocked(0, out.nodes(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) out.data[i] = std::max(out.data[i], std::abs(tmp.data[i]));
            });
        }
    }
    return out;
}

std::vector<Field> TruncatedConvolver::apply_all(const Field& f, std::span<const double> radii,
                                                 ConvMethod method) const {
    Impl& im = *impl_;
    std::vector<Field> out;
    out.reserve(radii.size());
    if (method == ConvMethod::Fft) {
        im.prepare_field(f);
        for (double t : radii) {
            Field g(im.grid, 1);
            im.apply_prepared(t, g);
            out.push_back(std::move(g));
        }
    } else {
        for (double t : radii) out.push_back(im.apply_direct(f, t));
    }
    return out;
}

}  // namespace maxpot
