#include "lplab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace lplab {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

LabRng::LabRng(std::uint64_t seed) : seed_(seed), state_(seed) {
    // warm up so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) splitmix64(state_);
}

LabRng LabRng::split(std::uint64_t stream) const {
    std::uint64_t s = seed_;
    std::uint64_t derived = splitmix64(s) ^ (stream * 0xda942042e4dd58b5ULL + 1);
    return LabRng(derived);
}

std::uint64_t LabRng::next() { return splitmix64(state_); }

double LabRng::uniform(double lo, double hi) {
    return lo + (next() >> 11) * 0x1.0p-53 * (hi - lo);
}

std::uint64_t LabRng::integer(std::uint64_t n) { return next() % n; }

GridFunction corpus_function(const DomainSpec& d, LabRng& rng, const Box* support) {
    const int K = 4;
    double L = d.half_extent;
    std::vector<double> ax(K), px(K), ay(K), py(K);
    for (int k = 0; k < K; ++k) {
        ax[k] = rng.uniform(-1.0, 1.0);
        px[k] = rng.uniform(0.0, 2 * M_PI);
        ay[k] = rng.uniform(-1.0, 1.0);
        py[k] = rng.uniform(0.0, 2 * M_PI);
    }
    GridFunction probe = GridFunction::constant(d, 0.0);
    Array s(d.total_cells());
    for (long i = 0; i < s.size(); ++i) {
        auto c = probe.cell_center(i);
        if (support && !support->contains_point(c)) {
            s[i] = 0.0;
            continue;
        }
        double v = 0.0;
        for (int k = 0; k < K; ++k) {
            double term = ax[k] * std::cos(M_PI * (k + 1) * c[0] / L + px[k]);
            if (d.dim == 2) term *= std::cos(M_PI * (k + 1) * c[1] / L + py[k]);
            v += term;
        }
        s[i] = v;
    }
    return GridFunction(d, std::move(s));
}

GridFunction corpus_weight(const DomainSpec& d, const WeightSpec& spec,
                           const std::vector<ShiftedDyadicGrid>& grids) {
    if (spec.kind == "power") return generate_weight_power(d, spec.a);
    if (spec.kind == "checker") return generate_weight_checker(d, spec.a, spec.b);
    if (spec.kind == "a1") return generate_weight_a1(d, spec.seed, 2.0, grids);
    throw std::invalid_argument("corpus_weight: unknown kind " + spec.kind);
}

std::vector<WeightSpec> default_weight_manifest(int count, double p, int n, LabRng& rng) {
    auto [lo, hi] = power_weight_range(n, p);
    std::vector<WeightSpec> out;
    for (int i = 0; i < count; ++i) {
        WeightSpec w;
        switch (i % 3) {
            case 0:
                w.kind = "power";
                w.a = rng.uniform(lo / 3, hi / 3);
                break;
            case 1:
                w.kind = "checker";
                w.a = rng.uniform(0.4, 0.9);
                w.b = rng.uniform(1.1, 2.5);
                break;
            default:
                w.kind = "a1";
                w.seed = rng.integer(1ULL << 62);
                break;
        }
        out.push_back(w);
    }
    return out;
}

FitResult fit_model(const std::vector<std::pair<double, double>>& points,
                    const std::string& model) {
    if (points.size() < 3) throw std::invalid_argument("fit_model: need >= 3 points");
    bool loglog = model == "loglog_line";
    if (!loglog && model != "gauss_decay")
        throw std::invalid_argument("fit_model: unknown model " + model);
    std::vector<double> X, Y;
    for (auto [x, y] : points) {
        if (!(y > 0)) throw std::invalid_argument("fit_model: non-positive ordinate");
        if (loglog && !(x > 0)) throw std::invalid_argument("fit_model: non-positive abscissa");
        X.push_back(loglog ? std::log(x) : x * x);
        Y.push_back(std::log(y));
    }
    double n = static_cast<double>(X.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        sx += X[i];
        sy += Y[i];
        sxx += X[i] * X[i];
        sxy += X[i] * Y[i];
        syy += Y[i] * Y[i];
    }
    double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 1e-14 * (1 + sxx * n)))
        throw std::invalid_argument("fit_model: degenerate abscissae");
    double b = (n * sxy - sx * sy) / den;
    double a = (sy - b * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < X.size(); ++i) {
        double e = Y[i] - (a + b * X[i]);
        ss_res += e * e;
        ss_tot += (Y[i] - ybar) * (Y[i] - ybar);
    }
    FitResult r;
    r.slope = loglog ? b : -b;
    r.intercept = a;
    r.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return r;
}

// ---------------------------------------------------------------------------

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["domain"] = {{"n", domain.dim}, {"L", domain.half_extent}, {"N", domain.cells_per_axis}};
    j["kernel"] = kernel_id;
    j["exponents"] = exponents;
    j["alpha"] = alpha;
    j["lambda"] = lambda;
    j["r"] = r;
    j["eta"] = eta;
    j["cases"] = cases;
    j["t_nodes"] = t_nodes;
    j["seed"] = seed;
    j["tol"] = tol;
    return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig c;
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("domain")) {
        auto& d = j["domain"];
        c.domain = DomainSpec(d.value("n", 1), d.value("L", 1.0), d.value("N", 256));
    }
    c.kernel_id = j.value("kernel", c.kernel_id);
    if (j.contains("exponents")) c.exponents = j["exponents"].get<std::vector<double>>();
    c.alpha = j.value("alpha", c.alpha);
    c.lambda = j.value("lambda", c.lambda);
    c.r = j.value("r", c.r);
    c.eta = j.value("eta", c.eta);
    c.cases = j.value("cases", c.cases);
    c.t_nodes = j.value("t_nodes", c.t_nodes);
    c.seed = j.value("seed", c.seed);
    c.tol = j.value("tol", c.tol);
    return c;
}

std::string ExperimentReport::to_json(bool include_wall) const {
    nlohmann::json j;
    j["experiment"] = config.experiment;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["cases"] = nlohmann::json::array();
    for (const auto& c : cases)
        j["cases"].push_back(
            {{"inputs", c.inputs}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ratio", c.ratio}});
    j["observed_constant"] = observed_constant;
    j["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    j["pass"] = pass;
    j["tail_bounds"] = tail_bounds;
    j["notes"] = notes;
    if (include_wall) j["wall_ms"] = wall_ms;
    return j.dump();
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "case_id,lhs,rhs,ratio\n";
    for (size_t i = 0; i < cases.size(); ++i)
        os << i << "," << cases[i].lhs << "," << cases[i].rhs << "," << cases[i].ratio << "\n";
    return os.str();
}

std::vector<std::string> experiment_ids() {
    return {"E1", "E1b", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E10"};
}

// ---------------------------------------------------------------------------

namespace {

struct Ctx {
    const ExperimentConfig& cfg;
    MultilinearKernel kernel;
    ExponentVector pv;
    double p;
    int m, n;
    std::vector<ShiftedDyadicGrid> grids;
    ConeQuadrature quad;
    LabRng root;

    explicit Ctx(const ExperimentConfig& c)
        : cfg(c),
          kernel(kernel_from_id(c.kernel_id)),
          pv(c.exponents),
          p(pv.total()),
          m(kernel.m),
          n(kernel.n),
          grids(all_shifted_grids(c.domain)),
          quad(ConeQuadrature::for_domain(c.domain, c.t_nodes)),
          root(c.seed) {
        if (pv.m() != m) throw HypothesisViolation("exponent count != kernel linearity");
        if (c.domain.dim != n) throw HypothesisViolation("domain dimension != kernel dimension");
    }

    std::vector<GridFunction> case_functions(int idx, const Box* support = nullptr) {
        LabRng rng = root.split(static_cast<std::uint64_t>(idx));
        std::vector<GridFunction> out;
        for (int j = 0; j < m; ++j) out.push_back(corpus_function(cfg.domain, rng, support));
        return out;
    }

    std::vector<GridFunction> case_weights(int idx, int count) {
        LabRng rng = root.split(0x5eedULL + static_cast<std::uint64_t>(idx));
        auto manifest = default_weight_manifest(count, std::max(p, 1.5), n, rng);
        std::vector<GridFunction> out;
        for (const auto& w : manifest) out.push_back(corpus_weight(cfg.domain, w, grids));
        return out;
    }
};

std::vector<const GridFunction*> ptrs(const std::vector<GridFunction>& v) {
    std::vector<const GridFunction*> out;
    for (const auto& f : v) out.push_back(&f);
    return out;
}

// Stability across the corpus is judged per ratio family: the tag after the
// case index groups comparable quantities.
void finish_stability(ExperimentReport& rep) {
    std::map<std::string, std::pair<double, double>> span;  // tag -> (lo, hi)
    bool finite = true;
    double overall = 0.0;
    for (const auto& c : rep.cases) {
        if (!std::isfinite(c.ratio)) finite = false;
        std::string tag = c.inputs.substr(c.inputs.find(':') + 1);
        auto [it, fresh] = span.try_emplace(tag, c.ratio, c.ratio);
        if (!fresh) {
            it->second.first = std::min(it->second.first, c.ratio);
            it->second.second = std::max(it->second.second, c.ratio);
        }
        overall = std::max(overall, c.ratio);
    }
    bool stable = !span.empty();
    for (const auto& [tag, lh] : span)
        stable = stable && lh.first > 0 && lh.second <= 10.0 * lh.first;
    rep.observed_constant = overall;
    rep.pass = finite && stable;
}

DyadicCube top_cube(const std::vector<ShiftedDyadicGrid>& grids) {
    const ShiftedDyadicGrid& g = grids.front();
    auto tops = level_cubes(g, g.k_min);
    DyadicCube best = tops.front();
    for (const auto& q : tops)
        if (q.measure() > best.measure()) best = q;
    return best;
}

// E1: alpha-scaling upper bound of ||S_alpha||_{L^p(nu)}.
ExperimentReport run_e1(Ctx& ctx, ExperimentReport& rep) {
    const double alphas[] = {1.0, 2.0, 4.0, 8.0};
    double worst_slope = 0.0;
    std::vector<std::pair<double, double>> pooled;
    bool ok = true;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        auto ws = ctx.case_weights(i, ctx.m);
        GridFunction nu = nu_weight(ptrs(ws), ctx.pv);
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        std::vector<std::pair<double, double>> pts;
        for (double a : alphas) {
            double nrm = lp_norm(s_alpha(tb, a), ctx.p, &nu);
            if (!(nrm > 0)) continue;
            pts.emplace_back(a, nrm);
            pooled.emplace_back(a, nrm);
            rep.cases.push_back({"case" + std::to_string(i) + ":alpha=" + std::to_string(a),
                                 nrm, std::pow(a, ctx.m * ctx.n),
                                 nrm / std::pow(a, ctx.m * ctx.n)});
        }
        if (pts.size() < 3) {
            ok = false;
            continue;
        }
        double slope = fit_model(pts, "loglog_line").slope;
        worst_slope = std::max(worst_slope, slope);
        if (!(slope <= ctx.m * ctx.n + 0.3)) ok = false;
    }
    rep.fit = fit_model(pooled, "loglog_line");
    rep.observed_constant = worst_slope;
    rep.pass = ok;
    rep.notes = "upper-bound slope only; sharpness from below is not certified";
    return rep;
}

// E1b: divergence of g*_lambda in the regime lambda < 2/p under domain doubling.
ExperimentReport run_e1b(Ctx& ctx, ExperimentReport& rep) {
    if (!(ctx.cfg.lambda < 2.0 / ctx.p))
        throw HypothesisViolation("E1b needs lambda < 2/p");
    double lambda = ctx.cfg.lambda;
    int base_n = std::min(ctx.cfg.domain.cells_per_axis, 64);
    double base_l = ctx.cfg.domain.half_extent;
    std::vector<double> norms;
    GridFunction last_g = GridFunction::constant(ctx.cfg.domain, 0.0);
    DomainSpec last_d = ctx.cfg.domain;
    for (int k = 0; k <= 3; ++k) {
        DomainSpec d(ctx.n, base_l * (1 << k), base_n * (1 << k));
        GridFunction probe = GridFunction::constant(d, 0.0);
        Array s = Array::Zero(d.total_cells());
        for (long i = 0; i < s.size(); ++i) {
            auto c = probe.cell_center(i);
            double r2 = c[0] * c[0] + c[1] * c[1];
            if (r2 < 0.25 * base_l * base_l) s[i] = 1.0;
        }
        GridFunction bump(d, std::move(s));
        std::vector<const GridFunction*> fs(ctx.m, &bump);
        ConeQuadrature q = ConeQuadrature::for_domain(d, ctx.cfg.t_nodes);
        GridFunction gs = g_star(ctx.kernel, fs, lambda, q);
        norms.push_back(lp_norm(gs, ctx.p));
        last_g = gs;
        last_d = d;
    }
    bool grows = true;
    for (size_t k = 1; k < norms.size(); ++k) {
        double growth = norms[k] / norms[k - 1];
        rep.cases.push_back({"doubling" + std::to_string(k), norms[k], norms[k - 1], growth});
        if (!(growth >= 1.05)) grows = false;
    }
    // tail shape over the outer decade of the largest domain
    double L = last_d.half_extent;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (long i = 0; i < last_g.samples.size(); ++i) {
        auto c = last_g.cell_center(i);
        double r = std::sqrt(c[0] * c[0] + c[1] * c[1]);
        if (r < 0.095 * L || r > 0.95 * L) continue;
        double v = last_g[i] * std::pow(r, ctx.n * lambda / 2.0);
        if (v > 0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    rep.cases.push_back({"tail_shape", hi, lo, hi / lo});
    rep.observed_constant = hi / lo;
    rep.pass = grows && hi <= 3.0 * lo;
    return rep;
}

// E2: two-weight Orlicz bump bounds for S_alpha and g*_lambda.
ExperimentReport run_e2(Ctx& ctx, ExperimentReport& rep) {
    if (!(ctx.cfg.lambda > 2.0 * ctx.m)) throw HypothesisViolation("E2 needs lambda > 2m");
    YoungFunction A = young_power(2.0);
    std::vector<YoungFunction> B;
    std::vector<double> bfac;
    for (int j = 0; j < ctx.m; ++j) {
        B.push_back(young_log_bump(ctx.pv.conj(j), 0.5));
        BpResult bp = bp_constant(complementary(B[j]), ctx.pv.p[j]);
        if (!bp.finite) throw HypothesisViolation("E2: dual bump fails B_p");
        bfac.push_back(std::pow(bp.value, 1.0 / ctx.pv.p[j]));
    }
    double gfac = std::pow(2.0, ctx.n * (ctx.cfg.lambda - 2 * ctx.m)) - 1.0;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        auto vs = ctx.case_weights(i, ctx.m);
        GridFunction u = nu_weight(ptrs(vs), ctx.pv);
        double norm_pair;
        try {
            norm_pair = bump_norm(u, ptrs(vs), A, B, ctx.pv, ctx.grids);
        } catch (const std::invalid_argument& e) {
            throw HypothesisViolation(e.what());
        }
        double nfac = norm_pair;
        for (double b : bfac) nfac *= b;
        double fprod = 1.0;
        for (int j = 0; j < ctx.m; ++j) fprod *= lp_norm(fs[j], ctx.pv.p[j], &vs[j]);
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        double lhs_s = lp_norm(s_alpha(tb, ctx.cfg.alpha), ctx.p, &u);
        double rhs_s = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * nfac * fprod;
        rep.cases.push_back({"case" + std::to_string(i) + ":S", lhs_s, rhs_s, lhs_s / rhs_s});
        double tail = 0.0;
        double lhs_g = lp_norm(g_star(tb, ctx.cfg.lambda, &tail), ctx.p, &u);
        double rhs_g = nfac / gfac * fprod;
        rep.cases.push_back({"case" + std::to_string(i) + ":g", lhs_g, rhs_g, lhs_g / rhs_g});
        rep.tail_bounds.push_back(tail);
    }
    finish_stability(rep);
    return rep;
}

// E3: Fefferman-Stein with M w_i on the right.
ExperimentReport run_e3(Ctx& ctx, ExperimentReport& rep) {
    if (!(ctx.p <= 2)) throw HypothesisViolation("E3 needs p <= 2");
    if (!(ctx.cfg.lambda > 2.0 * ctx.m)) throw HypothesisViolation("E3 needs lambda > 2m");
    double gfac = std::pow(2.0, ctx.n * (ctx.cfg.lambda - 2 * ctx.m)) - 1.0;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        auto ws = ctx.case_weights(i, ctx.m);
        GridFunction nu = nu_weight(ptrs(ws), ctx.pv);
        double fprod = 1.0;
        for (int j = 0; j < ctx.m; ++j) {
            GridFunction mw = hl_maximal(ws[j], ctx.grids);
            fprod *= lp_norm(fs[j], ctx.pv.p[j], &mw);
        }
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        double lhs_s = lp_norm(s_alpha(tb, ctx.cfg.alpha), ctx.p, &nu);
        double rhs_s = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * fprod;
        rep.cases.push_back({"case" + std::to_string(i) + ":S", lhs_s, rhs_s, lhs_s / rhs_s});
        double tail = 0.0;
        double lhs_g = lp_norm(g_star(tb, ctx.cfg.lambda, &tail), ctx.p, &nu);
        rep.cases.push_back(
            {"case" + std::to_string(i) + ":g", lhs_g, fprod / gfac, lhs_g * gfac / fprod});
        rep.tail_bounds.push_back(tail);
    }
    finish_stability(rep);
    return rep;
}

SparseFamily case_sparse_family(Ctx& ctx, int idx) {
    LabRng rng = ctx.root.split(0xabcdULL + static_cast<std::uint64_t>(idx));
    GridFunction f = corpus_function(ctx.cfg.domain, rng);
    DyadicCube q0 = top_cube(ctx.grids);
    LernerHytonen lh = lerner_hytonen(f, q0);
    SparseFamily fam = lh.family;
    fam.grid = q0.grid;
    bool has_top = false;
    for (const auto& q : fam.cubes) has_top = has_top || (q == q0);
    if (!has_top) fam.cubes.insert(fam.cubes.begin(), q0);
    return fam;
}

// E4: entropy-bump control of A_S^r and of S_alpha itself.
ExperimentReport run_e4(Ctx& ctx, ExperimentReport& rep) {
    if (!(ctx.p > 1)) throw HypothesisViolation("E4 needs p > 1");
    EntropyGauge eps(ctx.cfg.eta);
    double pp = conjugate_exponent(ctx.p);
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        for (auto& f : fs) f = gf_map(f, [](double v) { return std::abs(v); });
        auto ws = ctx.case_weights(i, ctx.m + 1);
        std::vector<GridFunction> sigma(ws.begin(), ws.begin() + ctx.m);
        GridFunction nu = ws.back();
        SparseFamily fam = case_sparse_family(ctx, i);
        std::vector<GridFunction> fsig;
        for (int j = 0; j < ctx.m; ++j) fsig.push_back(gf_product(fs[j], sigma[j]));
        double fprod = 1.0;
        for (int j = 0; j < ctx.m; ++j) fprod *= lp_norm(fs[j], ctx.pv.p[j], &sigma[j]);
        std::vector<const GridFunction*> sp = ptrs(sigma);
        std::vector<const GridFunction*> all = sp;
        all.push_back(&nu);
        for (double r : {1.0, 2.0, 3.0}) {
            GridFunction as = sparse_operator(fam, r, ptrs(fsig));
            double lhs = lp_norm(as, ctx.p, &nu);
            double cst;
            std::string which;
            if (ctx.p > r) {
                cst = std::pow(entropy_bump(sp, nu, ctx.pv, r, eps, ctx.grids), 1.0 / ctx.p);
                which = "p>r";
            } else {
                std::vector<double> q, parg;
                for (int j = 0; j < ctx.m; ++j) {
                    q.push_back(r / ctx.pv.conj(j));
                    parg.push_back(ctx.pv.p[j]);
                }
                q.push_back(r / ctx.p);
                parg.push_back(pp);
                cst = std::pow(entropy_bump_general(all, q, parg, r / ctx.p, ctx.m, eps,
                                                    ctx.grids),
                               1.0 / r);
                which = "p<=r";
            }
            double rhs = cst * fprod;
            rep.cases.push_back({"case" + std::to_string(i) + ":r=" + std::to_string(r) + ":" +
                                     which,
                                 lhs, rhs, lhs / rhs});
        }
        // the square-function form (p <= 2 branch of the operator theorem)
        if (ctx.p <= 2) {
            PsiTable tb = build_psi_table(ctx.kernel, ptrs(fsig), ctx.quad);
            double lhs = lp_norm(s_alpha(tb, ctx.cfg.alpha), ctx.p, &nu);
            std::vector<double> q, parg;
            for (int j = 0; j < ctx.m; ++j) {
                q.push_back(2.0 / ctx.pv.conj(j));
                parg.push_back(ctx.pv.p[j]);
            }
            q.push_back(2.0 / ctx.p);
            parg.push_back(pp);
            double cst = std::sqrt(
                entropy_bump_general(all, q, parg, 2.0 / ctx.p, ctx.m, eps, ctx.grids));
            double rhs = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * cst * fprod;
            rep.cases.push_back({"case" + std::to_string(i) + ":S", lhs, rhs, lhs / rhs});
        }
    }
    finish_stability(rep);
    return rep;
}

// E5: Sawyer-type mixed weak bounds.
ExperimentReport run_e5(Ctx& ctx, ExperimentReport& rep) {
    if (!(ctx.cfg.lambda > 2.0 * ctx.m)) throw HypothesisViolation("E5 needs lambda > 2m");
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        LabRng rng = ctx.root.split(0x7700ULL + static_cast<std::uint64_t>(i));
        std::vector<GridFunction> ws;
        for (int j = 0; j < ctx.m; ++j)
            ws.push_back(generate_weight_a1(ctx.cfg.domain, rng.integer(1ULL << 62), 2.0,
                                            ctx.grids));
        GridFunction v = generate_weight_power(ctx.cfg.domain, 0.3);
        for (const auto& w : ws)
            if (!std::isfinite(ap_constant(w, 1.0, ctx.grids)))
                throw HypothesisViolation("E5: w_i not in A_1");
        if (!std::isfinite(
                ap_constant(v, std::numeric_limits<double>::infinity(), ctx.grids)))
            throw HypothesisViolation("E5: v not in A_inf");
        Array us = Array::Ones(v.samples.size());
        for (const auto& w : ws) us *= w.samples.pow(1.0 / ctx.m);
        GridFunction u(ctx.cfg.domain, std::move(us), true);
        GridFunction uv =
            GridFunction(ctx.cfg.domain, u.samples * v.samples.pow(1.0 / ctx.m), true);
        auto fs = ctx.case_functions(i);
        double fprod = 1.0;
        for (int j = 0; j < ctx.m; ++j) fprod *= lp_norm(fs[j], 1.0, &ws[j]);
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        auto over_v = [&](const GridFunction& g) {
            return GridFunction(ctx.cfg.domain, g.samples / v.samples);
        };
        double lhs_s =
            weak_lp_norm(over_v(s_alpha(tb, ctx.cfg.alpha)), 1.0 / ctx.m, &uv);
        rep.cases.push_back(
            {"case" + std::to_string(i) + ":S", lhs_s, fprod, lhs_s / fprod});
        double lhs_g = weak_lp_norm(over_v(g_star(tb, ctx.cfg.lambda)), 1.0 / ctx.m, &uv);
        rep.cases.push_back(
            {"case" + std::to_string(i) + ":g", lhs_g, fprod, lhs_g / fprod});
    }
    finish_stability(rep);
    return rep;
}

// E6: Gaussian local decay of {S > t M} inside the support cube.
ExperimentReport run_e6(Ctx& ctx, ExperimentReport& rep) {
    double L = ctx.cfg.domain.half_extent;
    Box q = ctx.n == 1 ? Box::interval(-L / 2, L / 2)
                       : Box::rect(-L / 2, L / 2, -L / 2, L / 2);
    std::vector<double> ts;
    for (double t = 2.0; t <= 6.0 + 1e-9; t += 0.5) ts.push_back(t);
    std::vector<double> mass_s(ts.size(), 0.0), mass_g(ts.size(), 0.0);
    double total = 0.0;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i, &q);
        GridFunction mf = maximal(ptrs(fs), std::vector<double>(ctx.m, 1.0), ctx.grids);
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        GridFunction sa = s_alpha(tb, ctx.cfg.alpha);
        GridFunction gs = g_star(tb, ctx.cfg.lambda);
        double cm = sa.cell_measure();
        for (long c = 0; c < sa.samples.size(); ++c) {
            if (!q.contains_point(sa.cell_center(c))) continue;
            total += cm;
            for (size_t k = 0; k < ts.size(); ++k) {
                if (sa[c] > ts[k] * mf[c]) mass_s[k] += cm;
                if (gs[c] > ts[k] * mf[c]) mass_g[k] += cm;
            }
        }
    }
    auto collect = [&](const std::vector<double>& mass, const char* tag) {
        std::vector<std::pair<double, double>> pts;
        for (size_t k = 0; k < ts.size(); ++k) {
            double frac = mass[k] / total;
            rep.cases.push_back({std::string(tag) + ":t=" + std::to_string(ts[k]), frac,
                                 ts[k], frac});
            if (frac > 0) pts.emplace_back(ts[k], frac);
        }
        return pts;
    };
    auto pts_s = collect(mass_s, "S");
    auto pts_g = collect(mass_g, "g");
    FitResult fs_fit = fit_model(pts_s, "gauss_decay");
    FitResult fg_fit = fit_model(pts_g, "gauss_decay");
    rep.fit = fs_fit;
    rep.cases.push_back({"gstar_fit:rate_and_r2", fg_fit.slope, fg_fit.r2, fg_fit.slope});
    rep.observed_constant = std::exp(fs_fit.intercept);  // the c_1 of the fit
    rep.notes = "c1 = exp(intercept), c2 = rate; reported, not asserted";
    rep.pass = fs_fit.slope > 0 && fs_fit.r2 >= 0.9 && fg_fit.slope > 0 && fg_fit.r2 >= 0.9;
    return rep;
}

// E7: Coifman-Fefferman with the A_inf constant, plus the local A_p variant.
ExperimentReport run_e7(Ctx& ctx, ExperimentReport& rep) {
    double p = std::max(ctx.p, 2.0);
    DyadicCube q0 = top_cube(ctx.grids);
    Box qb = q0.box();
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        GridFunction w = ctx.case_weights(i, 1).front();
        double ainf = ap_constant(w, std::numeric_limits<double>::infinity(), ctx.grids);
        GridFunction mf = maximal(ptrs(fs), std::vector<double>(ctx.m, 1.0), ctx.grids);
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        GridFunction sa = s_alpha(tb, ctx.cfg.alpha);
        double lhs = lp_norm(sa, p, &w);
        double rhs = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * (p + 1) * std::sqrt(ainf) *
                     lp_norm(mf, p, &w);
        rep.cases.push_back({"case" + std::to_string(i) + ":CF", lhs, rhs, lhs / rhs});
        // local variant on the top cube, L^2(Q, w), A_2 constant
        double a2 = ap_constant(w, 2.0, ctx.grids);
        GridFunction s2w(ctx.cfg.domain, sa.samples.square() * w.samples, true);
        GridFunction m2w(ctx.cfg.domain, mf.samples.square() * w.samples, true);
        double lhs_l = std::sqrt(box_integral(s2w, qb));
        double rhs_l = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * std::sqrt(a2) *
                       std::sqrt(box_integral(m2w, qb));
        rep.cases.push_back(
            {"case" + std::to_string(i) + ":CF-local", lhs_l, rhs_l, lhs_l / rhs_l});
    }
    finish_stability(rep);
    return rep;
}

// E8: pointwise decomposition audit, sharp-maximal control, endpoint ratio.
ExperimentReport run_e8(Ctx& ctx, ExperimentReport& rep) {
    DyadicCube q0 = top_cube(ctx.grids);
    int failures = 0;
    BumpProfile prof = BumpProfile::smoothstep();
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        auto fs = ctx.case_functions(i);
        // eq:mf audit (factor exactly 2) on the corpus function itself
        try {
            LernerHytonen lh = lerner_hytonen(fs[0], q0);
            rep.cases.push_back({"case" + std::to_string(i) + ":mf_refinements",
                                 static_cast<double>(lh.refinements),
                                 static_cast<double>(lh.family.cubes.size()), 1.0});
        } catch (const SelfVerificationFailed&) {
            ++failures;
        }
        PsiTable tb = build_psi_table(ctx.kernel, ptrs(fs), ctx.quad);
        GridFunction st = s_tilde(tb, ctx.cfg.alpha, prof);
        GridFunction st2(ctx.cfg.domain, st.samples.square());
        // gamma < 1/(2m) as the sharp-maximal control requires; the observed
        // constant is the sup-norm ratio the pointwise bound implies (the raw
        // per-cell sup is too heavy-tailed for a stability criterion)
        GridFunction sharp = sharp_maximal(st2, 0.4 / ctx.m, ctx.grids);
        GridFunction mf = maximal(ptrs(fs), std::vector<double>(ctx.m, 1.0), ctx.grids);
        double a2mn = std::pow(ctx.cfg.alpha, 2.0 * ctx.m * ctx.n);
        double mf2max = mf.samples.square().maxCoeff();
        double c_obs = sharp.samples.maxCoeff() / (a2mn * mf2max);
        rep.cases.push_back({"case" + std::to_string(i) + ":sharp", c_obs, 1.0, c_obs});
        // endpoint: weak L^{1/m} of s_tilde against alpha^{mn} prod ||f||_1
        double fprod = 1.0;
        for (int j = 0; j < ctx.m; ++j) fprod *= lp_norm(fs[j], 1.0);
        double lhs = weak_lp_norm(st, 1.0 / ctx.m);
        double rhs = std::pow(ctx.cfg.alpha, ctx.m * ctx.n) * fprod;
        rep.cases.push_back({"case" + std::to_string(i) + ":endpoint", lhs, rhs, lhs / rhs});
    }
    // stability over the operator ratios only
    ExperimentReport sub;
    for (const auto& c : rep.cases)
        if (c.inputs.find(":sharp") != std::string::npos ||
            c.inputs.find(":endpoint") != std::string::npos)
            sub.cases.push_back(c);
    finish_stability(sub);
    rep.observed_constant = sub.observed_constant;
    rep.pass = failures == 0 && sub.pass;
    rep.notes = "mf self-verification failures: " + std::to_string(failures);
    return rep;
}

// E9: Carleson packing-to-embedding, scalar and multilinear.
ExperimentReport run_e9(Ctx& ctx, ExperimentReport& rep) {
    double p_sc = 2.0;
    bool ok = true;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        LabRng rng = ctx.root.split(0x9900ULL + static_cast<std::uint64_t>(i));
        SparseFamily fam = case_sparse_family(ctx, i);
        auto ws = ctx.case_weights(i, ctx.m + 1);
        GridFunction w = ws.back();
        std::map<DyadicCube, double> a;
        for (const auto& q : fam.cubes)
            a[q] += box_integral(w, q.box()) * rng.uniform(0.2, 1.0);
        double A = carleson_constant(a, w, *fam.grid);
        GridFunction f = gf_map(corpus_function(ctx.cfg.domain, rng),
                                [](double v) { return std::abs(v); });
        double lhs = 0.0;
        for (const auto& [q, aq] : a) {
            double avg = box_average_weighted(f, w, q.box());
            lhs += aq * std::pow(avg, p_sc);
        }
        lhs = std::pow(lhs, 1.0 / p_sc);
        double rhs = std::pow(A, 1.0 / p_sc) * conjugate_exponent(p_sc) *
                     lp_norm(f, p_sc, &w);
        rep.cases.push_back({"case" + std::to_string(i) + ":scalar", lhs, rhs, lhs / rhs});
        if (!(lhs <= rhs * (1 + ctx.cfg.tol))) ok = false;

        // multilinear version against nu = prod sigma_i^{p/p_i}
        std::vector<GridFunction> sigma(ws.begin(), ws.begin() + ctx.m);
        GridFunction nu = nu_weight(ptrs(sigma), ctx.pv);
        std::map<DyadicCube, double> am;
        for (const auto& q : fam.cubes)
            am[q] += box_integral(nu, q.box()) * rng.uniform(0.2, 1.0);
        double Am = carleson_constant(am, nu, *fam.grid);
        std::vector<GridFunction> fm;
        for (int j = 0; j < ctx.m; ++j)
            fm.push_back(gf_map(corpus_function(ctx.cfg.domain, rng),
                                [](double v) { return std::abs(v); }));
        double lhs_m = 0.0;
        for (const auto& [q, aq] : am) {
            double prod = 1.0;
            for (int j = 0; j < ctx.m; ++j)
                prod *= box_average_weighted(fm[j], sigma[j], q.box());
            lhs_m += aq * std::pow(prod, ctx.p);
        }
        lhs_m = std::pow(lhs_m, 1.0 / ctx.p);
        double rhs_m = Am;
        for (int j = 0; j < ctx.m; ++j)
            rhs_m *= ctx.pv.conj(j) * lp_norm(fm[j], ctx.pv.p[j], &sigma[j]);
        rep.cases.push_back(
            {"case" + std::to_string(i) + ":multi", lhs_m, rhs_m, lhs_m / rhs_m});
        if (!(lhs_m <= rhs_m * (1 + ctx.cfg.tol))) ok = false;
    }
    double hi = 0.0;
    for (const auto& c : rep.cases) hi = std::max(hi, c.ratio);
    rep.observed_constant = hi;
    rep.pass = ok;
    return rep;
}

// E10: exponential decay of sparse overlap counts.
ExperimentReport run_e10(Ctx& ctx, ExperimentReport& rep) {
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < ctx.cfg.cases; ++i) {
        SparseFamily fam = case_sparse_family(ctx, i);
        DyadicCube q0 = top_cube(ctx.grids);
        Box qb = q0.box();
        GridFunction probe = GridFunction::constant(ctx.cfg.domain, 0.0);
        std::vector<int> count(ctx.cfg.domain.total_cells(), 0);
        for (const auto& q : fam.cubes) {
            Box b = q.box();
            for (long c = 0; c < static_cast<long>(count.size()); ++c)
                if (b.contains_point(probe.cell_center(c))) ++count[c];
        }
        int max_n = 0;
        for (long c = 0; c < static_cast<long>(count.size()); ++c)
            if (qb.contains_point(probe.cell_center(c))) max_n = std::max(max_n, count[c]);
        double cm = probe.cell_measure(), total = 0.0;
        std::vector<double> exceed(static_cast<size_t>(max_n) + 1, 0.0);
        for (long c = 0; c < static_cast<long>(count.size()); ++c) {
            if (!qb.contains_point(probe.cell_center(c))) continue;
            total += cm;
            for (int k = 0; k < count[c]; ++k) exceed[static_cast<size_t>(k)] += cm;
        }
        for (size_t k = 0; k + 1 < exceed.size(); ++k) {
            if (!(exceed[k] > 0) || !(exceed[k + 1] > 0)) continue;
            double beta = exceed[k + 1] / exceed[k];
            worst = std::max(worst, beta);
            rep.cases.push_back({"case" + std::to_string(i) + ":k=" + std::to_string(k),
                                 exceed[k + 1] / total, exceed[k] / total, beta});
            if (!(beta < 1.0)) ok = false;
        }
    }
    rep.observed_constant = worst;
    rep.notes = "decay rate alpha >= " + std::to_string(worst > 0 ? -std::log(worst) : 0.0);
    rep.pass = ok && worst < 1.0;
    return rep;
}

}  // namespace

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config) {
    auto ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
        throw UnknownExperiment("unknown experiment id: " + id);
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = config;
    cfg.experiment = id;
    Ctx ctx(cfg);
    ExperimentReport rep;
    rep.config = cfg;
    if (id == "E1") run_e1(ctx, rep);
    else if (id == "E1b") run_e1b(ctx, rep);
    else if (id == "E2") run_e2(ctx, rep);
    else if (id == "E3") run_e3(ctx, rep);
    else if (id == "E4") run_e4(ctx, rep);
    else if (id == "E5") run_e5(ctx, rep);
    else if (id == "E6") run_e6(ctx, rep);
    else if (id == "E7") run_e7(ctx, rep);
    else if (id == "E8") run_e8(ctx, rep);
    else if (id == "E9") run_e9(ctx, rep);
    else if (id == "E10") run_e10(ctx, rep);
    auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

}  // namespace lplab
