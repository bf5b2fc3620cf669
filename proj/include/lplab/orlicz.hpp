#pragma once

#include <memory>
#include <string>

#include "lplab/dyadic.hpp"
#include "lplab/grid.hpp"

namespace lplab {

/// Young function: convex, increasing, Phi(t)/t -> 0 at 0 and -> inf at inf.
/// Registry ids: "power:p", "logbump:p:delta", "loglogbump:p:delta", "dual:<id>".
struct YoungFunction {
    std::string id;
    std::function<double(double)> eval_fn;
    std::function<double(double)> inverse_fn;  // may be empty: monotone bisection

    double operator()(double t) const { return eval_fn(t); }
    double inverse(double s) const;

    /// Shape audit: limits at 1e-6/1e6, midpoint convexity and strict growth
    /// on a geometric grid. Throws on violation.
    void validate() const;
};

YoungFunction young_power(double p);
YoungFunction young_log_bump(double p, double delta);
YoungFunction young_loglog_bump(double p, double delta);
YoungFunction young_from_id(const std::string& id);

/// Legendre transform conj(t) = sup_s (st - Phi(s)); analytic for powers,
/// ternary-search maximization otherwise.
YoungFunction complementary(const YoungFunction& phi);

/// Luxemburg norm inf{lam > 0 : <Phi(|f|/lam)>_B <= 1}, bisection to rel 1e-9.
double luxemburg_norm(const GridFunction& f, const Box& B, const YoungFunction& phi);

struct BpResult {
    bool finite = false;
    double value = 0.0;  // integral of Phi(t)/t^p dt/t over (1,inf) when finite
};

/// B_p constant by log-grid Simpson quadrature with power-law tail
/// extrapolation; divergent when the integrand stops decaying.
BpResult bp_constant(const YoungFunction& phi, double p);

/// M_Phi: per cell, sup of the Luxemburg norm over enumerated cubes
/// containing the cell center.
GridFunction orlicz_maximal(const GridFunction& f, const YoungFunction& phi,
                            const std::vector<ShiftedDyadicGrid>& grids);

}  // namespace lplab
