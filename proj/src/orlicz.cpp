#include "lplab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace lplab {

double YoungFunction::inverse(double s) const {
    if (s < 0) throw std::invalid_argument("young inverse: negative argument");
    if (s == 0.0) return 0.0;
    if (inverse_fn) return inverse_fn(s);
    double lo = 1.0, hi = 1.0;
    for (int i = 0; i < 2100 && eval_fn(hi) < s; ++i) hi *= 2;
    for (int i = 0; i < 2100 && eval_fn(lo) > s; ++i) lo /= 2;
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        (eval_fn(mid) < s ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

void YoungFunction::validate() const {
    if (eval_fn(0.0) != 0.0) throw std::invalid_argument(id + ": Phi(0) != 0");
    auto ratio = [&](double t) { return eval_fn(t) / t; };
    if (!(ratio(1e-6) < ratio(1.0) && ratio(1.0) < ratio(1e6)))
        throw std::invalid_argument(id + ": Phi(t)/t not increasing across scales");
    if (!(ratio(1e6) > 10 * ratio(1e-6)))
        throw std::invalid_argument(id + ": Phi(t)/t growth too weak");
    double prev_t = 1e-6, prev_v = eval_fn(prev_t);
    for (int i = 1; i <= 60; ++i) {
        double t = 1e-6 * std::pow(1e12, i / 60.0);
        double v = eval_fn(t);
        if (!(v > prev_v)) throw std::invalid_argument(id + ": not strictly increasing");
        double mid = (prev_t + t) / 2;
        if (eval_fn(mid) > (prev_v + v) / 2 * (1 + 1e-9))
            throw std::invalid_argument(id + ": midpoint convexity violated");
        prev_t = t;
        prev_v = v;
    }
}

YoungFunction young_power(double p) {
    if (!(p >= 1)) throw std::invalid_argument("young_power: p >= 1 required");
    YoungFunction y;
    std::ostringstream os;
    os << "power:" << p;
    y.id = os.str();
    y.eval_fn = [p](double t) { return std::pow(t, p); };
    y.inverse_fn = [p](double s) { return std::pow(s, 1.0 / p); };
    return y;
}

YoungFunction young_log_bump(double p, double delta) {
    YoungFunction y;
    std::ostringstream os;
    os << "logbump:" << p << ":" << delta;
    y.id = os.str();
    double e = p - 1 + delta;
    y.eval_fn = [p, e](double t) {
        return t == 0.0 ? 0.0 : std::pow(t, p) * std::pow(std::log(std::exp(1.0) + t), e);
    };
    return y;
}

YoungFunction young_loglog_bump(double p, double delta) {
    YoungFunction y;
    std::ostringstream os;
    os << "loglogbump:" << p << ":" << delta;
    y.id = os.str();
    double e1 = p - 1, e2 = p - 1 + delta;
    y.eval_fn = [p, e1, e2](double t) {
        if (t == 0.0) return 0.0;
        double l = std::log(std::exp(1.0) + t);
        double ll = std::log(std::log(std::exp(std::exp(1.0)) + t));
        return std::pow(t, p) * std::pow(l, e1) * std::pow(ll, e2);
    };
    return y;
}

namespace {

double legendre_sup(const YoungFunction& phi, double t) {
    // sup_s (s t - Phi(s)): concave in s, ternary search after bracketing.
    auto g = [&](double s) { return s * t - phi(s); };
    double hi = 1.0;
    while (g(2 * hi) > g(hi) && hi < 1e14) hi *= 2;
    double lo = 0.0;
    hi *= 2;
    for (int i = 0; i < 150; ++i) {
        double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
        if (g(a) < g(b))
            lo = a;
        else
            hi = b;
    }
    return std::max(0.0, g((lo + hi) / 2));
}

}  // namespace

YoungFunction complementary(const YoungFunction& phi) {
    YoungFunction y;
    y.id = "dual:" + phi.id;
    if (phi.id.rfind("power:", 0) == 0) {
        double p = std::stod(phi.id.substr(6));
        if (p == 1.0) throw std::invalid_argument("complementary: dual of power:1 diverges");
        double pp = p / (p - 1);
        double c = std::pow(p, -1.0 / (p - 1)) * (1.0 - 1.0 / p);
        y.eval_fn = [c, pp](double t) { return c * std::pow(t, pp); };
        y.inverse_fn = [c, pp](double s) { return std::pow(s / c, 1.0 / pp); };
        return y;
    }
    // Geometric tabulation of the Legendre transform; cubic log-log
    // interpolation inside the table, end-slope linear extension outside.
    const double t0 = 1e-10, t1 = 1e12;
    const int per_decade = 128;
    const int K = static_cast<int>(per_decade * std::log10(t1 / t0)) + 1;
    auto table = std::make_shared<std::vector<double>>(K);  // log values
    double dlog = std::log(t1 / t0) / (K - 1);
    for (int i = 0; i < K; ++i) {
        double t = t0 * std::exp(i * dlog);
        (*table)[i] = std::log(std::max(legendre_sup(phi, t), 1e-300));
    }
    double lt0 = std::log(t0);
    y.eval_fn = [table, lt0, dlog, K](double t) {
        if (t == 0.0) return 0.0;
        const std::vector<double>& tb = *table;
        double x = (std::log(t) - lt0) / dlog;
        double lv;
        if (x <= 0.0) {
            lv = tb[0] + x * (tb[1] - tb[0]);
        } else if (x >= K - 1) {
            lv = tb[K - 1] + (x - (K - 1)) * (tb[K - 1] - tb[K - 2]);
        } else {
            int i = std::clamp(static_cast<int>(std::floor(x)), 1, K - 3);
            double f = x - i;
            // Catmull-Rom through the four surrounding samples
            double a = tb[i - 1], b = tb[i], c = tb[i + 1], e = tb[i + 2];
            lv = b + 0.5 * f * (c - a + f * (2 * a - 5 * b + 4 * c - e +
                                             f * (3 * (b - c) + e - a)));
        }
        return std::exp(lv);
    };
    return y;
}

YoungFunction young_from_id(const std::string& id) {
    if (id.rfind("dual:", 0) == 0) return complementary(young_from_id(id.substr(5)));
    auto split = [&](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        return parts;
    };
    auto parts = split(id);
    if (parts.size() == 2 && parts[0] == "power") return young_power(std::stod(parts[1]));
    if (parts.size() == 3 && parts[0] == "logbump")
        return young_log_bump(std::stod(parts[1]), std::stod(parts[2]));
    if (parts.size() == 3 && parts[0] == "loglogbump")
        return young_loglog_bump(std::stod(parts[1]), std::stod(parts[2]));
    throw std::invalid_argument("unknown Young function id: " + id);
}

double luxemburg_norm(const GridFunction& f, const Box& B, const YoungFunction& phi) {
    double mb = B.measure();
    if (!(mb > 0)) throw std::invalid_argument("luxemburg_norm: zero-measure box");
    auto lv = box_value_masses(f, B);
    double vmax = 0.0;
    for (const auto& p : lv) vmax = std::max(vmax, std::abs(p.first));
    if (vmax == 0.0) return 0.0;
    auto avg = [&](double lam) {
        double s = 0.0;
        for (const auto& p : lv) s += phi(std::abs(p.first) / lam) * p.second;
        return s / mb;
    };
    double hi = vmax / phi.inverse(1.0);  // avg(hi) <= 1 by construction
    double lo = hi;
    while (lo > 1e-300 && avg(lo / 2) <= 1.0) lo /= 2;
    lo /= 2;  // avg(lo) > 1 (or underflow), avg at 2*lo <= 1
    hi = 2 * lo;
    for (int i = 0; i < 80; ++i) {
        double mid = (lo + hi) / 2;
        (avg(mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

BpResult bp_constant(const YoungFunction& phi, double p) {
    if (!(p > 1)) throw std::invalid_argument("bp_constant: p > 1 required");
    // integrand in u = log t: G(u) = Phi(t)/t^p
    auto G = [&](double u) {
        double t = std::exp(u);
        return phi(t) / std::pow(t, p);
    };
    const double U = std::log(1e8);
    const int steps = 64 * 8;  // Simpson intervals, must be even
    double du = U / steps, acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wgt * G(i * du);
    }
    acc *= du / 3.0;
    // decay slope over the last two decades
    double gT = G(U), gT2 = G(U - std::log(100.0));
    BpResult r;
    if (!(gT > 0) || !(gT2 > 0)) {
        r.finite = true;
        r.value = acc;
        return r;
    }
    double sigma = std::log(gT / gT2) / std::log(100.0);
    // Model the tail decay as G ~ u^{-beta} in u = log t (covers both power
    // decay in t, where beta explodes, and log-bump decay, where beta is the
    // log exponent). The tail integral converges iff beta > 1.
    double beta = -sigma * U;
    if (beta <= 1.05) return r;  // divergent (or logarithmically so)
    r.finite = true;
    r.value = acc + (sigma < -0.2 ? gT / (-sigma) : gT * U / (beta - 1.0));
    return r;
}

GridFunction orlicz_maximal(const GridFunction& f, const YoungFunction& phi,
                            const std::vector<ShiftedDyadicGrid>& grids) {
    Array out = Array::Zero(f.samples.size());
    for (const auto& g : grids) {
        for (const auto& Q : enumerate_cubes(g)) {
            Box b = Q.box();
            if (!(b.measure() > 0)) continue;
            double v = luxemburg_norm(f, b, phi);
            if (v <= 0) continue;
            for (long i = 0; i < out.size(); ++i)
                if (b.contains_point(f.cell_center(i))) out[i] = std::max(out[i], v);
        }
    }
    return GridFunction(f.domain, std::move(out));
}

}  // namespace lplab
