#include "lplab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace lplab {

namespace {

long floordiv(long a, long b) {
    long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

double pairs_rearrangement(std::vector<std::pair<double, double>> lv, double t) {
    // (|value|, mass) pairs; inf{a > 0 : mass(|f| > a) < t}.
    for (auto& p : lv) p.first = std::abs(p.first);
    std::sort(lv.begin(), lv.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double mass_above = 0.0, result = 0.0;
    for (size_t i = 0; i < lv.size();) {
        size_t j = i;
        double block = 0.0;
        while (j < lv.size() && lv[j].first == lv[i].first) block += lv[j++].second;
        if (mass_above < t)
            result = lv[i].first;
        else
            return result;  // mass_above >= t: no smaller value qualifies
        mass_above += block;
        i = j;
    }
    return mass_above < t ? 0.0 : result;
}

double pairs_lower_median(std::vector<std::pair<double, double>> lv) {
    std::sort(lv.begin(), lv.end());
    double total = 0.0;
    for (auto& p : lv) total += p.second;
    double below = 0.0;
    for (size_t i = 0; i < lv.size();) {
        size_t j = i;
        double block = 0.0;
        while (j < lv.size() && lv[j].first == lv[i].first) block += lv[j++].second;
        double above = total - below - block;
        if (below <= total / 2 + 1e-12 * total && above <= total / 2 + 1e-12 * total)
            return lv[i].first;
        below += block;
        i = j;
    }
    return lv.empty() ? 0.0 : lv.back().first;
}

double pairs_oscillation(std::vector<std::pair<double, double>> lv, double lambda) {
    // Shortest value window carrying mass > (1-lambda) * total; omega = half-length.
    std::sort(lv.begin(), lv.end());
    // merge equal values
    std::vector<double> vals, mass;
    for (size_t i = 0; i < lv.size();) {
        size_t j = i;
        double m = 0.0;
        while (j < lv.size() && lv[j].first == lv[i].first) m += lv[j++].second;
        vals.push_back(lv[i].first);
        mass.push_back(m);
        i = j;
    }
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    double target = (1.0 - lambda) * total;
    size_t K = vals.size();
    double best = std::numeric_limits<double>::infinity();
    size_t j = 0;
    double win = 0.0;
    for (size_t i = 0; i < K; ++i) {
        if (j < i) { j = i; win = 0.0; }
        if (j == i && win == 0.0) win = mass[i];
        while (win <= target && j + 1 < K) win += mass[++j];
        if (win > target) best = std::min(best, (vals[j] - vals[i]) / 2.0);
        win -= mass[i];
    }
    return std::isfinite(best) ? best : 0.0;
}

}  // namespace

ShiftedDyadicGrid::ShiftedDyadicGrid(const DomainSpec& d, std::array<int, 2> j)
    : domain(d), shift(j) {
    double L = d.half_extent;
    k_min = -static_cast<int>(std::ceil(std::log2(2.0 * L)));
    k_max = static_cast<int>(std::floor(std::log2(d.cells_per_axis / (2.0 * L)) + 1e-9));
    for (int a = 0; a < d.dim; ++a)
        if (shift[a] < 0 || shift[a] > 2) throw std::invalid_argument("grid shift out of range");
}

ShiftedDyadicGrid::ShiftedDyadicGrid(const DomainSpec& d, std::array<int, 2> j, int kmin,
                                     int kmax)
    : ShiftedDyadicGrid(d, j) {
    k_min = kmin;
    k_max = kmax;
}

Box DyadicCube::raw_box() const {
    double s = side();
    Box b;
    b.dim = grid->domain.dim;
    for (int a = 0; a < b.dim; ++a) {
        double sh = grid->shift_at_level(level, a);
        b.lo[a] = s * (pos[a] + sh);
        b.hi[a] = s * (pos[a] + 1 + sh);
    }
    return b;
}

Box DyadicCube::box() const {
    double L = grid->domain.half_extent;
    Box dom;
    dom.dim = grid->domain.dim;
    for (int a = 0; a < dom.dim; ++a) { dom.lo[a] = -L; dom.hi[a] = L; }
    return raw_box().intersect(dom);
}

std::vector<DyadicCube> DyadicCube::children() const {
    std::vector<DyadicCube> out;
    int n = grid->domain.dim;
    int par = (level % 2 == 0) ? 1 : -1;
    std::array<long, 2> base{{0, 0}};
    for (int a = 0; a < n; ++a) base[a] = 2 * pos[a] + par * grid->shift[a];
    int count = 1 << n;
    for (int c = 0; c < count; ++c) {
        DyadicCube ch;
        ch.grid = grid;
        ch.level = level + 1;
        ch.pos = base;
        ch.pos[0] += (c & 1);
        if (n == 2) ch.pos[1] += ((c >> 1) & 1);
        out.push_back(ch);
    }
    return out;
}

std::optional<DyadicCube> DyadicCube::parent() const {
    DyadicCube p;
    p.grid = grid;
    p.level = level - 1;
    int par = ((level - 1) % 2 == 0) ? 1 : -1;
    for (int a = 0; a < grid->domain.dim; ++a)
        p.pos[a] = floordiv(pos[a] - par * grid->shift[a], 2);
    return p;
}

bool DyadicCube::contains(const DyadicCube& other) const {
    if (other.level < level) return false;
    DyadicCube c = other;
    while (c.level > level) c = *c.parent();
    return c == *this;
}

std::vector<DyadicCube> level_cubes(const ShiftedDyadicGrid& g, int k) {
    std::vector<DyadicCube> out;
    double L = g.domain.half_extent;
    double s = std::ldexp(1.0, -k);
    int n = g.domain.dim;
    std::array<long, 2> lo{{0, 0}}, hi{{0, 0}};
    for (int a = 0; a < n; ++a) {
        double sh = g.shift_at_level(k, a);
        lo[a] = static_cast<long>(std::floor(-L / s - sh)) - 1;
        hi[a] = static_cast<long>(std::ceil(L / s - sh)) + 1;
    }
    auto emit = [&](long lx, long ly) {
        DyadicCube q;
        q.grid = &g;
        q.level = k;
        q.pos = {{lx, ly}};
        if (q.box().measure() > 0) out.push_back(q);
    };
    if (n == 1) {
        for (long lx = lo[0]; lx <= hi[0]; ++lx) emit(lx, 0);
    } else {
        for (long ly = lo[1]; ly <= hi[1]; ++ly)
            for (long lx = lo[0]; lx <= hi[0]; ++lx) emit(lx, ly);
    }
    return out;
}

std::vector<DyadicCube> enumerate_cubes(const ShiftedDyadicGrid& g, int k_lo, int k_hi) {
    if (k_lo < g.k_min || k_hi > g.k_max)
        throw std::invalid_argument("enumerate_cubes: level window out of bounds");
    std::vector<DyadicCube> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        auto lv = level_cubes(g, k);
        out.insert(out.end(), lv.begin(), lv.end());
    }
    return out;
}

std::vector<DyadicCube> enumerate_cubes(const ShiftedDyadicGrid& g) {
    return enumerate_cubes(g, g.k_min, g.k_max);
}

std::vector<ShiftedDyadicGrid> all_shifted_grids(const DomainSpec& d) {
    std::vector<ShiftedDyadicGrid> out;
    if (d.dim == 1) {
        for (int j = 0; j < 3; ++j) out.emplace_back(d, std::array<int, 2>{{j, 0}});
    } else {
        for (int jy = 0; jy < 3; ++jy)
            for (int jx = 0; jx < 3; ++jx)
                out.emplace_back(d, std::array<int, 2>{{jx, jy}});
    }
    return out;
}

SparseCheck verify_sparse(const SparseFamily& fam) {
    for (const auto& q : fam.cubes)
        if (q.grid != fam.grid)
            throw std::invalid_argument("verify_sparse: cubes from mixed grids");
    SparseCheck r;
    r.min_ratio = 1.0;
    r.pass = true;
    std::vector<DyadicCube> sorted = fam.cubes;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& Q : sorted) {
        double mq = Q.measure();
        if (mq <= 0) continue;
        // maximal proper descendants within the family
        double lost = 0.0;
        std::vector<DyadicCube> maximal;
        for (const auto& P : sorted) {
            if (P == Q || !Q.contains(P)) continue;
            bool covered = false;
            for (const auto& R : maximal)
                if (R.contains(P)) { covered = true; break; }
            if (!covered) {
                maximal.push_back(P);
                lost += P.measure();
            }
        }
        double ratio = (mq - lost) / mq;
        if (ratio < r.min_ratio) {
            r.min_ratio = ratio;
            r.worst = Q;
        }
    }
    r.pass = r.min_ratio >= fam.eta - 1e-12;
    return r;
}

double median_box(const GridFunction& f, const Box& B) {
    return pairs_lower_median(box_value_masses(f, B));
}

double median(const GridFunction& f, const DyadicCube& Q) {
    return median_box(f, Q.box());
}

double rearrangement(const GridFunction& f, double t) {
    if (!(t > 0)) throw std::invalid_argument("rearrangement: t must be positive");
    double h = f.cell_measure();
    std::vector<std::pair<double, double>> lv(f.samples.size());
    for (long i = 0; i < f.samples.size(); ++i) lv[i] = {f.samples[i], h};
    return pairs_rearrangement(std::move(lv), t);
}

double rearrangement_box(const GridFunction& f, const Box& B, double t) {
    if (!(t > 0)) throw std::invalid_argument("rearrangement: t must be positive");
    return pairs_rearrangement(box_value_masses(f, B), t);
}

double local_mean_oscillation_box(const GridFunction& f, const Box& B, double lambda) {
    if (!(lambda > 0 && lambda < 1))
        throw std::invalid_argument("local_mean_oscillation: lambda in (0,1)");
    return pairs_oscillation(box_value_masses(f, B), lambda);
}

double local_mean_oscillation(const GridFunction& f, const DyadicCube& Q, double lambda) {
    return local_mean_oscillation_box(f, Q.box(), lambda);
}

namespace {

// Overlap measure of box B with the union of cells flagged in `mask`.
double masked_overlap(const GridFunction& f, const std::vector<char>& mask, const Box& B) {
    const DomainSpec& d = f.domain;
    AxisOverlap ox = axis_overlap(d, B.lo[0], B.hi[0]);
    if (ox.lengths.size() == 0) return 0.0;
    double s = 0.0;
    if (d.dim == 1) {
        for (int k = 0; k < ox.lengths.size(); ++k)
            if (mask[ox.first + k]) s += ox.lengths[k];
        return s;
    }
    AxisOverlap oy = axis_overlap(d, B.lo[1], B.hi[1]);
    int N = d.cells_per_axis;
    for (int ky = 0; ky < oy.lengths.size(); ++ky) {
        long base = static_cast<long>(oy.first + ky) * N + ox.first;
        for (int kx = 0; kx < ox.lengths.size(); ++kx)
            if (mask[base + kx]) s += ox.lengths[kx] * oy.lengths[ky];
    }
    return s;
}

struct LhBuilder {
    const GridFunction& f;
    double lambda;           // 2^{-n-2}
    double density;          // 2^{-n-1} stopping density
    double factor;           // oscillation multiple defining the exceptional set
    std::vector<DyadicCube> cubes;
    std::vector<double> coeffs;
    int depth_cap;

    void decompose(const DyadicCube& Q0, double m0) {
        double om = local_mean_oscillation(f, Q0, lambda);
        if (om > 0.0) {
            cubes.push_back(Q0);
            coeffs.push_back(om);
        }
        // Exceptional set: cells where |f - m0| exceeds factor * omega.
        std::vector<char> mask(f.samples.size(), 0);
        bool any = false;
        for (long i = 0; i < f.samples.size(); ++i) {
            if (std::abs(f.samples[i] - m0) > factor * om * (1 + 1e-12)) {
                mask[i] = 1;
                any = true;
            }
        }
        if (!any) return;
        for (const auto& ch : Q0.children()) descend(ch, mask, m0);
    }

    void descend(const DyadicCube& P, const std::vector<char>& mask, double m0) {
        double mp = P.box().measure();
        if (mp <= 0) return;
        double excess = masked_overlap(f, mask, P.box());
        if (excess <= 0) return;
        if (excess > density * mp * (1 + 1e-12)) {
            // maximal stopping cube: recurse with a fresh median
            if (P.level > depth_cap)
                throw SelfVerificationFailed("lerner_hytonen: depth cap reached");
            decompose(P, median(f, P));
            return;
        }
        for (const auto& ch : P.children()) descend(ch, mask, m0);
    }
};

}  // namespace

LernerHytonen lerner_hytonen(const GridFunction& f, const DyadicCube& Q0) {
    int n = f.domain.dim;
    double lambda = std::ldexp(1.0, -n - 2);
    double density = std::ldexp(1.0, -n - 1);
    double m0 = median(f, Q0);

    for (int attempt = 0; attempt < 6; ++attempt) {
        LhBuilder b{f, lambda, density, 2.0 / (1 << attempt), {}, {}, Q0.grid->k_max + 64};
        try {
            b.decompose(Q0, m0);
        } catch (const SelfVerificationFailed&) {
            continue;
        }
        // Pointwise audit at cell centers of Q0.
        Array rhs = Array::Zero(f.samples.size());
        Box qb = Q0.box();
        for (size_t c = 0; c < b.cubes.size(); ++c) {
            Box bb = b.cubes[c].box();
            for (long i = 0; i < f.samples.size(); ++i)
                if (bb.contains_point(f.cell_center(i))) rhs[i] += 2.0 * b.coeffs[c];
        }
        double scale = std::max(1.0, f.samples.abs().maxCoeff());
        bool ok = true;
        for (long i = 0; i < f.samples.size(); ++i) {
            if (!qb.contains_point(f.cell_center(i))) continue;
            if (std::abs(f.samples[i] - m0) > rhs[i] + 1e-9 * scale) { ok = false; break; }
        }
        if (!ok) continue;
        LernerHytonen out;
        out.median_value = m0;
        out.family.grid = Q0.grid;
        out.family.cubes = b.cubes;
        out.family.eta = 0.5;
        out.coefficients = b.coeffs;
        out.refinements = attempt;
        return out;
    }
    throw SelfVerificationFailed("lerner_hytonen: pointwise bound not attained");
}

double carleson_constant(const std::map<DyadicCube, double>& a, const GridFunction& w,
                         const ShiftedDyadicGrid& grid) {
    for (const auto& [q, v] : a) {
        if (q.grid != &grid) throw std::invalid_argument("carleson_constant: cube grid mismatch");
        if (v < 0) throw std::invalid_argument("carleson_constant: negative coefficient");
    }
    std::vector<DyadicCube> tops = enumerate_cubes(grid);
    for (const auto& [q, v] : a) tops.push_back(q);
    double best = 0.0;
    for (const auto& Q0 : tops) {
        double sum = 0.0;
        for (const auto& [q, v] : a)
            if (Q0.contains(q)) sum += v;
        if (sum <= 0) continue;
        double wq = box_integral(w, Q0.box());
        if (!(wq > 0))
            throw std::invalid_argument("carleson_constant: weight vanishes under a-mass");
        best = std::max(best, sum / wq);
    }
    return best;
}

GridFunction sharp_maximal(const GridFunction& f, double delta,
                           const std::vector<ShiftedDyadicGrid>& grids) {
    if (!(delta > 0 && delta < 1))
        throw std::invalid_argument("sharp_maximal: delta in (0,1)");
    GridFunction fd = gf_map(f, [delta](double v) { return std::pow(std::abs(v), delta); });
    Array out = Array::Zero(f.samples.size());
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            auto lv = box_value_masses(fd, b);
            double c = pairs_lower_median(lv);
            double acc = 0.0;
            for (const auto& p : lv) acc += std::abs(p.first - c) * p.second;
            double val = std::pow(acc / mq, 1.0 / delta);
            for (long i = 0; i < out.size(); ++i)
                if (b.contains_point(f.cell_center(i))) out[i] = std::max(out[i], val);
        }
    }
    return GridFunction(f.domain, std::move(out));
}

GridFunction maximal(const std::vector<const GridFunction*>& fs,
                     const std::vector<double>& exponents,
                     const std::vector<ShiftedDyadicGrid>& grids, std::optional<int> skip) {
    if (fs.empty() || fs.size() != exponents.size())
        throw std::invalid_argument("maximal: slot/exponent mismatch");
    const GridFunction& f0 = *fs[0];
    for (const auto* f : fs)
        if (!(f->domain == f0.domain)) throw std::invalid_argument("maximal: domain mismatch");
    std::vector<GridFunction> abs_fs;
    for (const auto* f : fs) abs_fs.push_back(gf_map(*f, [](double v) { return std::abs(v); }));
    Array out = Array::Zero(f0.samples.size());
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            double mq = b.measure();
            if (mq <= 0) continue;
            double prod = 1.0;
            for (size_t s = 0; s < fs.size(); ++s) {
                if (skip && static_cast<int>(s) == *skip) continue;
                if (exponents[s] == 0.0) continue;
                prod *= std::pow(box_integral(abs_fs[s], b) / mq, exponents[s]);
            }
            for (long i = 0; i < out.size(); ++i)
                if (b.contains_point(f0.cell_center(i))) out[i] = std::max(out[i], prod);
        }
    }
    return GridFunction(f0.domain, std::move(out));
}

GridFunction hl_maximal(const GridFunction& f, const std::vector<ShiftedDyadicGrid>& grids) {
    return maximal({&f}, {1.0}, grids);
}

GridFunction sparse_operator(const SparseFamily& S, double r,
                             const std::vector<const GridFunction*>& fs) {
    if (!(r >= 1)) throw std::invalid_argument("sparse_operator: r >= 1 required");
    if (fs.empty()) throw std::invalid_argument("sparse_operator: no inputs");
    const GridFunction& f0 = *fs[0];
    std::vector<GridFunction> abs_fs;
    for (const auto* f : fs) abs_fs.push_back(gf_map(*f, [](double v) { return std::abs(v); }));
    Array acc = Array::Zero(f0.samples.size());
    for (const auto& Q : S.cubes) {
        Box b = Q.box();
        double mq = b.measure();
        if (mq <= 0) continue;
        double prod = 1.0;
        for (const auto& af : abs_fs) prod *= box_integral(af, b) / mq;
        double term = std::pow(prod, r);
        for (long i = 0; i < acc.size(); ++i)
            if (b.contains_point(f0.cell_center(i))) acc[i] += term;
    }
    Array out = acc.pow(1.0 / r);
    return GridFunction(f0.domain, std::move(out));
}

std::string to_json(const SparseFamily& fam) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& q : fam.cubes) {
        nlohmann::ordered_json e;
        e["grid_shift"] = std::vector<int>(fam.grid->shift.begin(),
                                           fam.grid->shift.begin() + fam.grid->domain.dim);
        e["level"] = q.level;
        e["position"] = std::vector<long>(q.pos.begin(), q.pos.begin() + fam.grid->domain.dim);
        arr.push_back(e);
    }
    return arr.dump();
}

SparseFamily sparse_family_from_json(const std::string& text, const ShiftedDyadicGrid& grid) {
    auto j = nlohmann::json::parse(text);
    SparseFamily fam;
    fam.grid = &grid;
    for (const auto& e : j) {
        auto sh = e["grid_shift"].get<std::vector<int>>();
        for (size_t a = 0; a < sh.size(); ++a)
            if (sh[a] != grid.shift[a])
                throw std::invalid_argument("sparse_family_from_json: shift mismatch");
        DyadicCube q;
        q.grid = &grid;
        q.level = e["level"].get<int>();
        auto p = e["position"].get<std::vector<long>>();
        for (size_t a = 0; a < p.size(); ++a) q.pos[a] = p[a];
        fam.cubes.push_back(q);
    }
    return fam;
}

}  // namespace lplab
