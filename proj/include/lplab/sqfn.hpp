#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lplab/dyadic.hpp"
#include "lplab/grid.hpp"

namespace lplab {

/// Factorized m-linear kernel psi(x, y_vec) = psi0(x - y_1) prod_{j>=2} phi(x - y_j),
/// both factors radial with support radius 1. The cancellation variant has
/// integral(psi0) = 0 exactly (analytic re-centering of a truncated Gaussian
/// second derivative); the non-cancellation variant is a plain bump.
struct MultilinearKernel {
    std::string id;
    int m = 2;
    int n = 1;
    bool cancellation = true;
    // certified size/smoothness parameters
    double A = 0.0;
    double delta = 1.0;
    double gamma = 1.0;
    double support_radius = 1.0;

    std::function<double(double)> psi0;  // argument |u|^2
    std::function<double(double)> phi;   // argument |u|^2

    double sup_psi0 = 0.0;  // numeric sup norms, filled by the registry
    double sup_phi = 0.0;

    double eval(const std::array<double, 2>& x,
                const std::vector<std::array<double, 2>>& y) const;
};

/// Registry ids: "cancel:m:n", "nocancel:m:n" with m in {1,2,3}, n in {1,2}.
MultilinearKernel kernel_from_id(const std::string& id);

struct KernelReport {
    double A_obs = 0.0;  // worst sampled size-condition ratio
    bool delta_ok = false;
    bool gamma_ok = false;
    bool pass = false;
};

/// Sampled audit of the size condition |psi| <= A / prod(1 + |x-y_j|)^{n+delta}
/// and the gamma-Holder smoothness bound, seeded. Separations go down to 1e-6
/// so inserted jumps blow up the difference quotients.
KernelReport kernel_validate(const MultilinearKernel& k, int samples, std::uint64_t seed = 1);

/// psi_t(f_vec)(x) = t^{-mn} int psi((x-y_1)/t, ...) prod f_j(y_j) dy, evaluated
/// at cell centers by the midpoint rule; factorizes into m single convolutions.
GridFunction psi_t_apply(const MultilinearKernel& k,
                         const std::vector<const GridFunction*>& fs, double t);

/// Geometric t-nodes (midpoint rule in log t) on [t_min, t_max], shared across
/// apertures so pointwise operator comparisons are node-exact.
struct ConeQuadrature {
    double t_min = 0.0, t_max = 0.0;
    int T = 0;
    std::vector<double> nodes;
    double dlog = 0.0;  // node weight for dt/t

    ConeQuadrature() = default;
    ConeQuadrature(double tmin, double tmax, int count);
    /// Default window [h, 4L] for a domain.
    static ConeQuadrature for_domain(const DomainSpec& d, int count);
};

/// Shared per-node energy table: energy[k][c] = |psi_{t_k}(f_vec)(y_c)|^2 *
/// m(cell) * dlog / t_k^n, so every square function is a weighted sum of it.
struct PsiTable {
    DomainSpec domain;
    ConeQuadrature quad;
    std::vector<Array> energy;
    double tail_coeff = 0.0;  // sum over nodes of the outside-the-box energy bound
};

PsiTable build_psi_table(const MultilinearKernel& k,
                         const std::vector<const GridFunction*>& fs,
                         const ConeQuadrature& quad);

/// Smooth radial cutoff with 1_{B(0,1)} <= Phi <= 1_{B(0,2)}.
struct BumpProfile {
    std::function<double(double)> eval;  // argument |u|

    static BumpProfile smoothstep();
    static BumpProfile indicator2();  // degenerate: exact 1_{B(0,2)}
};

/// S_alpha from a shared table: cone membership |x - y_c| < alpha * t_k by
/// cell-center test.
GridFunction s_alpha(const PsiTable& table, double alpha);

/// g*_lambda with weight (t/(t+|x-y|))^{n lambda}; y truncated at the domain
/// box, the size-condition tail estimate reported through tail_bound if given.
GridFunction g_star(const PsiTable& table, double lambda, double* tail_bound = nullptr);

/// Cone sum with smooth cutoff Phi(|x-y|/(alpha t)).
GridFunction s_tilde(const PsiTable& table, double alpha, const BumpProfile& profile);

// Convenience wrappers building a one-shot table.
GridFunction s_alpha(const MultilinearKernel& k, const std::vector<const GridFunction*>& fs,
                     double alpha, const ConeQuadrature& quad);
GridFunction g_star(const MultilinearKernel& k, const std::vector<const GridFunction*>& fs,
                    double lambda, const ConeQuadrature& quad, double* tail_bound = nullptr);
GridFunction s_tilde(const MultilinearKernel& k, const std::vector<const GridFunction*>& fs,
                     double alpha, const BumpProfile& profile, const ConeQuadrature& quad);

}  // namespace lplab
