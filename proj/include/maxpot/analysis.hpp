#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxpot/catalog.hpp"
#include "maxpot/operators.hpp"

namespace maxpot {

/// Outcome of one verification check. pass holds iff every stated tolerance
/// is met; everything needed to reproduce the run is embedded.
struct CheckReport {
    std::string check;
    bool pass = false;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double violation_fraction = 0.0;
    std::map<std::string, double> tolerances;
    std::map<std::string, double> metrics;
    nlohmann::json config;
    nlohmann::json detail;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

/// Deterministic enumeration of catalog functions for probes.
struct FunctionFamily {
    struct Member {
        std::string catalog;
        CatalogParams params;
        std::string label;
    };
    std::vector<Member> members;
    std::uint64_t seed = 1;

    /// 20 members: 5 gaussian dilates, 3 smooth bumps, 3 ball indicators,
    /// 3 mild truncated powers, 6 seeded band-limited fields.
    static FunctionFamily default_family(std::uint64_t seed);
    /// Truncated powers approaching the L^p integrability edge a -> n/p,
    /// for the exploratory open-range probe.
    static FunctionFamily concentrating_family(double p, int dim);
    static FunctionFamily gaussian_dilates(const std::vector<double>& sigmas);
};

struct ProbeRow {
    std::string label;
    std::string params;
    double norm_f_p = 0.0;
    double norm_pstar = 0.0;
    double norm_grad_p = 0.0;
    double ratio = 0.0;
};

struct ProbeResult {
    double p = 0.0;
    bool exploratory = false;
    std::vector<ProbeRow> rows;
    double family_max = 0.0;
    /// Filled by probe_with_refinement: per-member relative change and the
    /// refined family max.
    std::vector<double> refinement_deltas;
    std::optional<double> refined_family_max;
    nlohmann::json config;

    nlohmann::json to_json() const;
};

/// Smooth compactly supported test function for the distributional-gradient
/// check: an off-center gaussian under a radial plateau window.
Field offset_gaussian_bump(const Grid& grid, const Vec& center, double sigma, double r0, double R);

/// Spherical-average representation: mean of f over S(x,t) against
/// (1/(n omega_n)) int_{|x-z|>=t} grad f(z) (x-z)/|x-z|^n dz, at interior
/// nodes, residuals normalized by the per-radius sup of the spherical
/// average.
CheckReport verify_representation(const Field& f, const std::vector<double>& radii, double tol,
                                  const SphereQuadrature& quad, const TruncationPolicy& policy);

/// Distributional gradient of K~: for each kernel component i and axis j,
///   -int K~_i d_j phi  vs  c_ij phi(0) + int_{|x|>=eps} d_j K~_i phi
/// along a decreasing eps ladder, with a trend check on the tail.
CheckReport verify_distributional_gradient(const KernelSpec& spec, const Field& phi,
                                           const std::vector<double>& eps_list, double tol,
                                           const SphereQuadrature& quad,
                                           const TruncationPolicy& policy);

/// Pointwise domination A*_Omega f <= sup|Omega| I_1|f| + slack, with
/// slack = sup|Omega| n omega_n t_min max|f| (the untruncated near-ball
/// contribution). For nonnegative f with Omega = 1 the gap itself is
/// checked against [0, 1.01 n omega_n t_min max f].
CheckReport verify_domination(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                              const TruncationPolicy& policy);

/// |grad A*_Omega f| <= (1+rel_tol) T* f + abs_tol*scale at interior nodes.
/// extended = true also tests the segment estimate
/// |A*f(x) - A*f(y)| <= int_xy T*f along random grid-axis segments.
CheckReport verify_gradient_bound(const Field& f, const KernelSpec& spec,
                                  const RadiusLadder& ladder, const TruncationPolicy& policy,
                                  const SphereQuadrature& quad, double rel_tol, double abs_tol,
                                  bool extended, std::uint64_t seed);

/// Empirical L^p -> W^{1,p} ratio sweep for one operator over a family.
/// op is "maximal_potential" or "riesz_potential".
ProbeResult probe_operator_norm(const std::string& op, const FunctionFamily& family,
                                const NormSettings& settings, const Grid& grid,
                                const RadiusLadder& ladder, const KernelSpec& spec,
                                const TruncationPolicy& policy);

/// Runs the probe on grid and on a once-refined grid (half spacing, same
/// absolute ladder) and records per-member relative changes.
ProbeResult probe_with_refinement(const std::string& op, const FunctionFamily& family,
                                  const NormSettings& settings, const Grid& grid,
                                  const RadiusLadder& ladder, const KernelSpec& spec,
                                  const TruncationPolicy& policy);

struct StudyRow {
    int res = 0;
    double h = 0.0;
    double error = 0.0;
    double observed_order = 0.0;  // vs the previous row; 0 for the first
};

/// Convergence study against a registered oracle. Keys: (operator id,
/// catalog id); unknown pairs throw.
std::vector<StudyRow> refinement_study(const std::string& op, const std::string& f,
                                       const std::vector<int>& resolutions);

std::vector<std::string> refinement_study_cases();

}  // namespace maxpot
