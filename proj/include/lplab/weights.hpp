#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lplab/dyadic.hpp"
#include "lplab/grid.hpp"
#include "lplab/orlicz.hpp"

namespace lplab {

/// Exponent tuple (p_1,...,p_m), all > 1, with the derived 1/p = sum 1/p_i.
struct ExponentVector {
    std::vector<double> p;

    explicit ExponentVector(std::vector<double> ps) : p(std::move(ps)) {
        for (double v : p)
            if (!(v > 1)) throw std::invalid_argument("ExponentVector: p_i > 1 required");
        if (p.empty()) throw std::invalid_argument("ExponentVector: empty");
    }

    int m() const { return static_cast<int>(p.size()); }
    double total() const {
        double inv = 0.0;
        for (double v : p) inv += 1.0 / v;
        return 1.0 / inv;
    }
    double conj(int i) const { return p[i] / (p[i] - 1.0); }
};

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

/// Gauge eps(t) = (1 + log t)^{1+eta}, eta > 0; integral certificate for
/// int_1^inf dt/(eps(t) t).
struct EntropyGauge {
    double eta = 1.0;

    explicit EntropyGauge(double e) : eta(e) {
        if (!(e > 0)) throw std::invalid_argument("EntropyGauge: eta > 0 required");
    }
    double operator()(double t) const { return std::pow(1.0 + std::log(t), 1.0 + eta); }
    // exact: int_1^inf dt/((1+log t)^{1+eta} t) = 1/eta
    double tail_integral() const { return 1.0 / eta; }
};

/// [w]_{A_p} over the enumerated cubes; p = 1 uses <w>_Q / essinf_Q w, p = inf
/// the maximal-integral functional sup_Q (1/w(Q)) int_Q M(w 1_Q).
double ap_constant(const GridFunction& w, double p, const std::vector<ShiftedDyadicGrid>& grids);

/// [w_vec]_{A_pvec} per the multilinear definition, exponent 1/p on <nu>_Q.
double multi_ap_constant(const std::vector<const GridFunction*>& w, const ExponentVector& pv,
                         const std::vector<ShiftedDyadicGrid>& grids);

/// nu = prod w_i^{p/p_i}.
GridFunction nu_weight(const std::vector<const GridFunction*>& w, const ExponentVector& pv);

/// Orlicz-bump norm of the pair (u, v_vec); branch on p <= 2 vs p > 2.
/// Validates the B_p hypotheses on the complementary bumps before evaluating.
double bump_norm(const GridFunction& u, const std::vector<const GridFunction*>& v,
                 const YoungFunction& A, const std::vector<YoungFunction>& B,
                 const ExponentVector& pv, const std::vector<ShiftedDyadicGrid>& grids);

struct TwoWeightFunctionals {
    double double_bump = 0.0;  // [u,v]_{A,B,p}
    double sep_a = 0.0;        // [u,v]_{A,p'}
    double sep_b = 0.0;        // [u,v]_{p,B}
    double ap = 0.0;           // [u,v]_{A_p}
};

TwoWeightFunctionals two_weight_functionals(const GridFunction& u, const GridFunction& v,
                                            const YoungFunction& A, const YoungFunction& B,
                                            double p,
                                            const std::vector<ShiftedDyadicGrid>& grids);

/// rho(Q) = (int_Q M^{p/pvec}(sigma 1_Q)) / (int_Q prod sigma_i^{p/p_i}),
/// with the same-grid dyadic restricted maximal. m = 1 gives rho_nu.
double entropy_rho(const std::vector<const GridFunction*>& sigma,
                   const std::vector<double>& exponents, const DyadicCube& Q);

/// Scalar-form entropy bump constant over enumerated cubes.
double entropy_bump(const std::vector<const GridFunction*>& sigma, const GridFunction& nu,
                    const ExponentVector& pv, double r, const EntropyGauge& eps,
                    const std::vector<ShiftedDyadicGrid>& grids);

/// General-form entropy bump with skip slot j (0-based) over sigma_1..sigma_{m+1};
/// q and p_arg have m+1 entries; the inner maximal is the global enumerated one.
double entropy_bump_general(const std::vector<const GridFunction*>& sigma,
                            const std::vector<double>& q, const std::vector<double>& p_arg,
                            double theta, int j, const EntropyGauge& eps,
                            const std::vector<ShiftedDyadicGrid>& grids);

/// T_u f = M(fu)/u where u != 0, else 0.
GridFunction t_u(const GridFunction& f, const GridFunction& u,
                 const std::vector<ShiftedDyadicGrid>& grids);

struct RdfResult {
    GridFunction Rh;
    double normalizer = 0.0;  // per-step growth bound used in the series
    double tail_bound = 0.0;  // norm bound on the dropped tail
    int terms = 0;
};

/// Rubio de Francia series R h = sum_k M^k h / (2 norm)^k, truncated at K
/// terms; normalizer = 2 x measured per-step L^{r'} growth of M.
RdfResult rubio_de_francia(const GridFunction& h, double r_prime, int K,
                           const std::vector<ShiftedDyadicGrid>& grids);

/// Variant iterating T_u with a supplied normalizer K0.
RdfResult rubio_de_francia_tu(const GridFunction& h, const GridFunction& u, double K0, int K,
                              const std::vector<ShiftedDyadicGrid>& grids);

// Weight generators. power: |x - center|^a sampled at cell centers; checker:
// alternating two-value cells; a1: Rubio de Francia majorant of a seeded bump.
GridFunction generate_weight_power(const DomainSpec& d, double a,
                                   std::array<double, 2> center = {{0.0, 0.0}});
GridFunction generate_weight_checker(const DomainSpec& d, double a, double b);
GridFunction generate_weight_a1(const DomainSpec& d, std::uint64_t seed, double r_prime,
                                const std::vector<ShiftedDyadicGrid>& grids,
                                double* normalizer_out = nullptr);

/// Admissible power-weight exponent range for A_p on the truncated box.
inline std::pair<double, double> power_weight_range(int n, double p) {
    return {-n + 0.1, n * (p - 1.0) - 0.1};
}

}  // namespace lplab
