#include "lplab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lplab {

namespace {

// Cells overlapping a box, with overlap measures.
struct CellOverlap {
    std::vector<long> index;
    std::vector<double> mass;
};

CellOverlap cell_overlaps(const DomainSpec& d, const Box& B) {
    CellOverlap out;
    AxisOverlap ox = axis_overlap(d, B.lo[0], B.hi[0]);
    if (ox.lengths.size() == 0) return out;
    if (d.dim == 1) {
        for (int k = 0; k < ox.lengths.size(); ++k)
            if (ox.lengths[k] > 0) {
                out.index.push_back(ox.first + k);
                out.mass.push_back(ox.lengths[k]);
            }
        return out;
    }
    AxisOverlap oy = axis_overlap(d, B.lo[1], B.hi[1]);
    int N = d.cells_per_axis;
    for (int ky = 0; ky < oy.lengths.size(); ++ky) {
        if (oy.lengths[ky] <= 0) continue;
        long base = static_cast<long>(oy.first + ky) * N + ox.first;
        for (int kx = 0; kx < ox.lengths.size(); ++kx) {
            double m = ox.lengths[kx] * oy.lengths[ky];
            if (m > 0) {
                out.index.push_back(base + kx);
                out.mass.push_back(m);
            }
        }
    }
    return out;
}

// int_Q sup_{x in R subset Q, same grid} prod <sigma_i>_R^{e_i}. Cubes above Q
// contribute less than Q itself for the restricted data, so descendants of Q
// (including Q) realize the dyadic maximal of sigma 1_Q on Q.
double restricted_max_integral(const std::vector<const GridFunction*>& sigma,
                               const std::vector<double>& exps, const DyadicCube& Q) {
    const GridFunction& s0 = *sigma[0];
    Box qb = Q.box();
    CellOverlap ov = cell_overlaps(s0.domain, qb);
    if (ov.index.empty()) return 0.0;
    std::vector<double> vals(ov.index.size(), 0.0);
    std::vector<DyadicCube> stack{Q};
    while (!stack.empty()) {
        DyadicCube R = stack.back();
        stack.pop_back();
        Box rb = R.box().intersect(qb);
        double mr = rb.measure();
        if (mr <= 0) continue;
        double prod = 1.0;
        for (size_t s = 0; s < sigma.size(); ++s)
            prod *= std::pow(box_integral(*sigma[s], rb) / mr, exps[s]);
        for (size_t c = 0; c < ov.index.size(); ++c)
            if (rb.contains_point(s0.cell_center(ov.index[c])))
                vals[c] = std::max(vals[c], prod);
        if (R.level < R.grid->k_max)
            for (const auto& ch : R.children()) stack.push_back(ch);
    }
    double acc = 0.0;
    for (size_t c = 0; c < ov.index.size(); ++c) acc += vals[c] * ov.mass[c];
    return acc;
}

}  // namespace

double ap_constant(const GridFunction& w, double p, const std::vector<ShiftedDyadicGrid>& grids) {
    if (!(p >= 1)) throw std::invalid_argument("ap_constant: p >= 1 required");
    double best = 0.0;
    bool infinite_p = std::isinf(p);
    std::optional<GridFunction> ws;
    if (!infinite_p && p > 1) ws = gf_pow(w, 1.0 - conjugate_exponent(p), true);
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double wq = box_integral(w, b);
            double val;
            if (infinite_p) {
                if (!(wq > 0)) continue;
                val = restricted_max_integral({&w}, {1.0}, Q) / wq;
            } else if (p == 1.0) {
                // infimum over the cell-center samples inside Q, matching the
                // collocation used by the maximal operators; keeps the A_1
                // functional a certified lower bound
                CellOverlap ov = cell_overlaps(w.domain, b);
                double inf = std::numeric_limits<double>::infinity();
                for (long idx : ov.index)
                    if (b.contains_point(w.cell_center(idx))) inf = std::min(inf, w[idx]);
                if (std::isinf(inf)) continue;  // sliver cube with no center
                if (!(inf > 0)) throw std::invalid_argument("ap_constant: weight vanishes");
                val = (wq / mq) / inf;
            } else {
                val = (wq / mq) * std::pow(box_integral(*ws, b) / mq, p - 1.0);
            }
            best = std::max(best, val);
        }
    }
    return best;
}

double multi_ap_constant(const std::vector<const GridFunction*>& w, const ExponentVector& pv,
                         const std::vector<ShiftedDyadicGrid>& grids) {
    if (w.size() != static_cast<size_t>(pv.m()))
        throw std::invalid_argument("multi_ap_constant: slot mismatch");
    GridFunction nu = nu_weight(w, pv);
    double p = pv.total();
    std::vector<GridFunction> dual;
    for (int i = 0; i < pv.m(); ++i)
        dual.push_back(gf_pow(*w[i], 1.0 - pv.conj(i), true));
    double best = 0.0;
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double val = std::pow(box_integral(nu, b) / mq, 1.0 / p);
            for (int i = 0; i < pv.m(); ++i)
                val *= std::pow(box_integral(dual[i], b) / mq, 1.0 / pv.conj(i));
            best = std::max(best, val);
        }
    }
    return best;
}

GridFunction nu_weight(const std::vector<const GridFunction*>& w, const ExponentVector& pv) {
    if (w.size() != static_cast<size_t>(pv.m()))
        throw std::invalid_argument("nu_weight: slot mismatch");
    double p = pv.total();
    Array s = Array::Ones(w[0]->samples.size());
    for (int i = 0; i < pv.m(); ++i) s *= w[i]->samples.pow(p / pv.p[i]);
    return GridFunction(w[0]->domain, std::move(s), true);
}

double bump_norm(const GridFunction& u, const std::vector<const GridFunction*>& v,
                 const YoungFunction& A, const std::vector<YoungFunction>& B,
                 const ExponentVector& pv, const std::vector<ShiftedDyadicGrid>& grids) {
    if (v.size() != B.size() || v.size() != static_cast<size_t>(pv.m()))
        throw std::invalid_argument("bump_norm: slot mismatch");
    double p = pv.total();
    for (int j = 0; j < pv.m(); ++j)
        if (!bp_constant(complementary(B[j]), pv.p[j]).finite)
            throw std::invalid_argument("bump_norm: dual of B_" + std::to_string(j) +
                                        " fails the B_p condition");
    if (p > 2 && !bp_constant(complementary(A), conjugate_exponent(p / 2)).finite)
        throw std::invalid_argument("bump_norm: dual of A fails B_{(p/2)'}");

    std::optional<GridFunction> u_scaled;
    if (p > 2) u_scaled = gf_pow(u, 2.0 / p, true);
    std::vector<GridFunction> v_scaled;
    for (int j = 0; j < pv.m(); ++j) v_scaled.push_back(gf_pow(*v[j], -1.0 / pv.p[j], true));

    double best = 0.0;
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double val;
            if (p <= 2)
                val = std::pow(box_integral(u, b) / mq, 1.0 / p);  // ||u^{1/p}||_{p,Q}
            else
                val = std::sqrt(luxemburg_norm(*u_scaled, b, A));
            for (int j = 0; j < pv.m(); ++j) val *= luxemburg_norm(v_scaled[j], b, B[j]);
            best = std::max(best, val);
        }
    }
    return best;
}

TwoWeightFunctionals two_weight_functionals(const GridFunction& u, const GridFunction& v,
                                            const YoungFunction& A, const YoungFunction& B,
                                            double p,
                                            const std::vector<ShiftedDyadicGrid>& grids) {
    if (!(p > 1)) throw std::invalid_argument("two_weight_functionals: p > 1 required");
    double pp = conjugate_exponent(p);
    GridFunction up = gf_pow(u, 1.0 / p, true);
    GridFunction vm = gf_pow(v, -1.0 / p, true);
    GridFunction vmp = gf_pow(v, -pp / p, true);  // (v^{-1/p})^{p'}
    TwoWeightFunctionals r;
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double nuA = luxemburg_norm(up, b, A);
            double nup = std::pow(box_integral(u, b) / mq, 1.0 / p);
            double nvB = luxemburg_norm(vm, b, B);
            double nvp = std::pow(box_integral(vmp, b) / mq, 1.0 / pp);
            r.double_bump = std::max(r.double_bump, nuA * nvB);
            r.sep_a = std::max(r.sep_a, nuA * nvp);
            r.sep_b = std::max(r.sep_b, nup * nvB);
            r.ap = std::max(r.ap, nup * nvp);
        }
    }
    return r;
}

double entropy_rho(const std::vector<const GridFunction*>& sigma,
                   const std::vector<double>& exponents, const DyadicCube& Q) {
    Box b = Q.box();
    Array prod = Array::Ones(sigma[0]->samples.size());
    for (size_t i = 0; i < sigma.size(); ++i) prod *= sigma[i]->samples.pow(exponents[i]);
    GridFunction pf(sigma[0]->domain, std::move(prod), true);
    double denom = box_integral(pf, b);
    if (!(denom > 0)) throw std::invalid_argument("entropy_rho: degenerate denominator");
    return restricted_max_integral(sigma, exponents, Q) / denom;
}

double entropy_bump(const std::vector<const GridFunction*>& sigma, const GridFunction& nu,
                    const ExponentVector& pv, double r, const EntropyGauge& eps,
                    const std::vector<ShiftedDyadicGrid>& grids) {
    if (sigma.size() != static_cast<size_t>(pv.m()))
        throw std::invalid_argument("entropy_bump: slot mismatch");
    if (!(r >= 1)) throw std::invalid_argument("entropy_bump: r >= 1 required");
    double p = pv.total();
    std::vector<double> exps;
    for (int i = 0; i < pv.m(); ++i) exps.push_back(p / pv.p[i]);
    double best = 0.0;
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double val = box_integral(nu, b) / mq;
            for (int i = 0; i < pv.m(); ++i)
                val *= std::pow(box_integral(*sigma[i], b) / mq, p / pv.conj(i));
            double rs = std::max(entropy_rho(sigma, exps, Q), 1.0);
            double rn = std::max(entropy_rho({&nu}, {1.0}, Q), 1.0);
            val *= rs * eps(rs) * std::pow(rn * eps(rn), p / r - 1.0);
            best = std::max(best, val);
        }
    }
    return best;
}

double entropy_bump_general(const std::vector<const GridFunction*>& sigma,
                            const std::vector<double>& q, const std::vector<double>& p_arg,
                            double theta, int j, const EntropyGauge& eps,
                            const std::vector<ShiftedDyadicGrid>& grids) {
    size_t k = sigma.size();
    if (q.size() != k || p_arg.size() != k || j < 0 || j >= static_cast<int>(k))
        throw std::invalid_argument("entropy_bump_general: slot mismatch");
    std::vector<double> exps(k, 0.0);
    for (size_t i = 0; i < k; ++i) exps[i] = 1.0 / (theta * p_arg[i]);
    GridFunction mg = maximal(sigma, exps, grids, j);
    Array prod = Array::Ones(sigma[0]->samples.size());
    for (size_t i = 0; i < k; ++i) {
        if (static_cast<int>(i) == j) continue;
        prod *= sigma[i]->samples.pow(exps[i]);
    }
    GridFunction pf(sigma[0]->domain, std::move(prod), true);
    double best = 0.0;
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double denom = box_integral(pf, b);
            if (!(denom > 0)) continue;
            double ratio = std::pow(box_integral(mg, b) / denom, theta);
            double val = ratio * eps(std::max(ratio, 1.0));
            for (size_t i = 0; i < k; ++i)
                val *= std::pow(box_integral(*sigma[i], b) / mq, q[i]);
            best = std::max(best, val);
        }
    }
    return best;
}

GridFunction t_u(const GridFunction& f, const GridFunction& u,
                 const std::vector<ShiftedDyadicGrid>& grids) {
    GridFunction m = hl_maximal(gf_product(f, u), grids);
    Array out(f.samples.size());
    for (long i = 0; i < out.size(); ++i)
        out[i] = u[i] != 0.0 ? m[i] / u[i] : 0.0;
    return GridFunction(f.domain, std::move(out));
}

namespace {

RdfResult rdf_series(const GridFunction& h, double r_prime, int K, double normalizer,
                     const std::function<GridFunction(const GridFunction&)>& op) {
    RdfResult res;
    res.normalizer = normalizer;
    res.terms = K + 1;
    Array acc = h.samples;
    GridFunction cur = h;
    double scale = 1.0;
    for (int k = 1; k <= K; ++k) {
        cur = op(cur);
        scale /= 2.0 * normalizer;
        acc += cur.samples * scale;
    }
    res.tail_bound = std::pow(2.0, -K + 1) * lp_norm(h, r_prime);
    res.Rh = GridFunction(h.domain, std::move(acc), true);
    return res;
}

}  // namespace

RdfResult rubio_de_francia(const GridFunction& h, double r_prime, int K,
                           const std::vector<ShiftedDyadicGrid>& grids) {
    if (!(r_prime > 1)) throw std::invalid_argument("rubio_de_francia: r' > 1 required");
    if ((h.samples < 0).any()) throw std::invalid_argument("rubio_de_francia: h >= 0 required");
    if (h.samples.maxCoeff() == 0.0) {
        RdfResult z;
        z.Rh = GridFunction(h.domain, Array::Zero(h.samples.size()), true);
        z.normalizer = 1.0;
        z.terms = K + 1;
        return z;
    }
    // measure the per-step L^{r'} growth of M on this grid
    double growth = 1.0;
    {
        GridFunction cur = h;
        double prev = lp_norm(cur, r_prime);
        for (int k = 0; k < std::min(K, 6); ++k) {
            cur = hl_maximal(cur, grids);
            double nrm = lp_norm(cur, r_prime);
            growth = std::max(growth, nrm / prev);
            prev = nrm;
        }
    }
    double normalizer = 2.0 * growth;
    return rdf_series(h, r_prime, K, normalizer,
                      [&](const GridFunction& g) { return hl_maximal(g, grids); });
}

RdfResult rubio_de_francia_tu(const GridFunction& h, const GridFunction& u, double K0, int K,
                              const std::vector<ShiftedDyadicGrid>& grids) {
    if ((h.samples < 0).any()) throw std::invalid_argument("rubio_de_francia: h >= 0 required");
    // verify summability: K0 must dominate the observed per-step growth
    GridFunction cur = h;
    double prev = lp_norm(cur, 2.0);
    for (int k = 0; k < 4 && prev > 0; ++k) {
        cur = t_u(cur, u, grids);
        double nrm = lp_norm(cur, 2.0);
        if (nrm > K0 * prev * (1 + 1e-12))
            throw std::invalid_argument("rubio_de_francia_tu: series not summable at K0");
        prev = nrm;
    }
    return rdf_series(h, 2.0, K, K0,
                      [&](const GridFunction& g) { return t_u(g, u, grids); });
}

GridFunction generate_weight_power(const DomainSpec& d, double a, std::array<double, 2> center) {
    Array s(d.total_cells());
    GridFunction probe = GridFunction::constant(d, 0.0);
    for (long i = 0; i < s.size(); ++i) {
        auto c = probe.cell_center(i);
        double r2 = 0.0;
        for (int ax = 0; ax < d.dim; ++ax) r2 += (c[ax] - center[ax]) * (c[ax] - center[ax]);
        if (r2 == 0.0)
            throw std::invalid_argument("generate_weight_power: center hits a cell center");
        s[i] = std::pow(std::sqrt(r2), a);
    }
    return GridFunction(d, std::move(s), true);
}

GridFunction generate_weight_checker(const DomainSpec& d, double a, double b) {
    if (!(a > 0) || !(b > 0))
        throw std::invalid_argument("generate_weight_checker: positive values required");
    Array s(d.total_cells());
    int N = d.cells_per_axis;
    for (long i = 0; i < s.size(); ++i) {
        long ix = i % N, iy = i / N;
        s[i] = ((ix + iy) % 2 == 0) ? a : b;
    }
    return GridFunction(d, std::move(s), true);
}

GridFunction generate_weight_a1(const DomainSpec& d, std::uint64_t seed, double r_prime,
                                const std::vector<ShiftedDyadicGrid>& grids,
                                double* normalizer_out) {
    std::mt19937_64 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        double u = (rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };
    double L = d.half_extent;
    Array s = Array::Zero(d.total_cells());
    GridFunction probe = GridFunction::constant(d, 0.0);
    for (int b = 0; b < 3; ++b) {
        double amp = uni(0.5, 2.0);
        std::array<double, 2> c{{uni(-L / 2, L / 2), uni(-L / 2, L / 2)}};
        double wdt = uni(L / 8, L / 2);
        for (long i = 0; i < s.size(); ++i) {
            auto x = probe.cell_center(i);
            double r2 = 0.0;
            for (int ax = 0; ax < d.dim; ++ax) r2 += (x[ax] - c[ax]) * (x[ax] - c[ax]);
            s[i] += amp * std::exp(-r2 / (wdt * wdt));
        }
    }
    RdfResult r = rubio_de_francia(GridFunction(d, std::move(s), true), r_prime, 30, grids);
    if (normalizer_out) *normalizer_out = r.normalizer;
    return r.Rh;
}

}  // namespace lplab
