#include "lplab/grid.hpp"

#include <algorithm>
#include <vector>

#include "json.hpp"

namespace lplab {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

void DomainSpec::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("DomainSpec: dim must be 1 or 2");
    if (!(half_extent > 0)) throw std::invalid_argument("DomainSpec: L must be positive");
    if (!is_pow2(cells_per_axis)) throw std::invalid_argument("DomainSpec: N must be a power of two");
    int cap = dim == 1 ? 4096 : 256;
    if (cells_per_axis > cap) throw std::invalid_argument("DomainSpec: N exceeds desk-scale cap");
}

AxisOverlap axis_overlap(const DomainSpec& d, double a, double b) {
    AxisOverlap r;
    double L = d.half_extent, h = d.cell_width();
    a = std::max(a, -L);
    b = std::min(b, L);
    if (b <= a) return r;
    int i0 = std::clamp(static_cast<int>(std::floor((a + L) / h)), 0, d.cells_per_axis - 1);
    int i1 = std::clamp(static_cast<int>(std::ceil((b + L) / h)) - 1, 0, d.cells_per_axis - 1);
    r.first = i0;
    r.lengths = Eigen::ArrayXd(i1 - i0 + 1);
    for (int i = i0; i <= i1; ++i) {
        double clo = -L + i * h, chi = clo + h;
        r.lengths[i - i0] = std::max(0.0, std::min(b, chi) - std::max(a, clo));
    }
    return r;
}

std::vector<std::pair<double, double>> box_value_masses(const GridFunction& f, const Box& B) {
    const DomainSpec& d = f.domain;
    std::vector<std::pair<double, double>> out;
    AxisOverlap ox = axis_overlap(d, B.lo[0], B.hi[0]);
    if (ox.lengths.size() == 0) return out;
    if (d.dim == 1) {
        for (int k = 0; k < ox.lengths.size(); ++k)
            if (ox.lengths[k] > 0) out.push_back({f.samples[ox.first + k], ox.lengths[k]});
        return out;
    }
    AxisOverlap oy = axis_overlap(d, B.lo[1], B.hi[1]);
    int N = d.cells_per_axis;
    for (int ky = 0; ky < oy.lengths.size(); ++ky) {
        if (oy.lengths[ky] <= 0) continue;
        long base = static_cast<long>(oy.first + ky) * N + ox.first;
        for (int kx = 0; kx < ox.lengths.size(); ++kx) {
            double m = ox.lengths[kx] * oy.lengths[ky];
            if (m > 0) out.push_back({f.samples[base + kx], m});
        }
    }
    return out;
}

double integral(const GridFunction& f) {
    return f.samples.sum() * f.cell_measure();
}

double box_integral(const GridFunction& f, const Box& B) {
    const DomainSpec& d = f.domain;
    AxisOverlap ox = axis_overlap(d, B.lo[0], B.hi[0]);
    if (ox.lengths.size() == 0) return 0.0;
    if (d.dim == 1) {
        double s = 0.0;
        for (int k = 0; k < ox.lengths.size(); ++k)
            s += ox.lengths[k] * f.samples[ox.first + k];
        return s;
    }
    AxisOverlap oy = axis_overlap(d, B.lo[1], B.hi[1]);
    if (oy.lengths.size() == 0) return 0.0;
    double s = 0.0;
    int N = d.cells_per_axis;
    for (int ky = 0; ky < oy.lengths.size(); ++ky) {
        double row = 0.0;
        long base = static_cast<long>(oy.first + ky) * N + ox.first;
        for (int kx = 0; kx < ox.lengths.size(); ++kx)
            row += ox.lengths[kx] * f.samples[base + kx];
        s += row * oy.lengths[ky];
    }
    return s;
}

double box_average(const GridFunction& f, const Box& B) {
    double m = B.measure();
    if (!(m > 0)) throw std::invalid_argument("box_average: zero-measure box");
    return box_integral(f, B) / m;
}

double box_average_weighted(const GridFunction& f, const GridFunction& w, const Box& B) {
    GridFunction fw = gf_product(f, w);
    double denom = box_integral(w, B);
    if (!(denom > 0)) throw std::invalid_argument("box_average_weighted: weight vanishes on box");
    return box_integral(fw, B) / denom;
}

double lp_norm(const GridFunction& f, double p, const GridFunction* w) {
    if (!(p > 0)) throw std::invalid_argument("lp_norm: p must be positive");
    if (std::isinf(p)) {
        double s = 0.0;
        for (long i = 0; i < f.samples.size(); ++i) {
            if (w && (*w)[i] <= 0) continue;
            s = std::max(s, std::abs(f.samples[i]));
        }
        return s;
    }
    double h = f.cell_measure(), acc = 0.0;
    for (long i = 0; i < f.samples.size(); ++i) {
        double mass = w ? (*w)[i] * h : h;
        if (mass == 0.0) continue;
        acc += std::pow(std::abs(f.samples[i]), p) * mass;
    }
    return std::pow(acc, 1.0 / p);
}

double weak_lp_norm(const GridFunction& f, double p, const GridFunction* w) {
    if (!(p > 0)) throw std::invalid_argument("weak_lp_norm: p must be positive");
    long n = f.samples.size();
    double h = f.cell_measure();
    std::vector<std::pair<double, double>> lv(n);  // (|value|, mass)
    for (long i = 0; i < n; ++i)
        lv[i] = {std::abs(f.samples[i]), w ? (*w)[i] * h : h};
    std::sort(lv.begin(), lv.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    // Level sets are right-open: at threshold t = |v_k| the measure of {|f| > t}
    // is the mass strictly above v_k; evaluate at each distinct magnitude.
    double best = 0.0, mass_above = 0.0;
    for (long i = 0; i < n;) {
        long j = i;
        while (j < n && lv[j].first == lv[i].first) ++j;
        // threshold just below lv[i].first captures mass_above + this block.
        double block = 0.0;
        for (long k = i; k < j; ++k) block += lv[k].second;
        double t = lv[i].first;
        if (t > 0.0)
            best = std::max(best, t * std::pow(mass_above + block, 1.0 / p));
        mass_above += block;
        i = j;
    }
    return best;
}

double ess_inf_box(const GridFunction& f, const Box& B) {
    const DomainSpec& d = f.domain;
    AxisOverlap ox = axis_overlap(d, B.lo[0], B.hi[0]);
    if (ox.lengths.size() == 0) return 0.0;
    double r = std::numeric_limits<double>::infinity();
    if (d.dim == 1) {
        for (int k = 0; k < ox.lengths.size(); ++k)
            if (ox.lengths[k] > 0) r = std::min(r, f.samples[ox.first + k]);
        return r;
    }
    AxisOverlap oy = axis_overlap(d, B.lo[1], B.hi[1]);
    int N = d.cells_per_axis;
    for (int ky = 0; ky < oy.lengths.size(); ++ky) {
        if (oy.lengths[ky] <= 0) continue;
        long base = static_cast<long>(oy.first + ky) * N + ox.first;
        for (int kx = 0; kx < ox.lengths.size(); ++kx)
            if (ox.lengths[kx] > 0) r = std::min(r, f.samples[base + kx]);
    }
    return r;
}

double ess_sup_box(const GridFunction& f, const Box& B) {
    GridFunction neg(f.domain, -f.samples);
    return -ess_inf_box(neg, B);
}

GridFunction gf_map(const GridFunction& f, const std::function<double(double)>& fn) {
    Array s(f.samples.size());
    for (long i = 0; i < s.size(); ++i) s[i] = fn(f.samples[i]);
    return GridFunction(f.domain, std::move(s), f.nonneg);
}

GridFunction gf_product(const GridFunction& a, const GridFunction& b) {
    if (!(a.domain == b.domain)) throw std::invalid_argument("gf_product: domain mismatch");
    return GridFunction(a.domain, a.samples * b.samples, a.nonneg && b.nonneg);
}

GridFunction gf_pow(const GridFunction& f, double e, bool weight) {
    Array s(f.samples.size());
    for (long i = 0; i < s.size(); ++i) s[i] = std::pow(f.samples[i], e);
    return GridFunction(f.domain, std::move(s), weight);
}

std::string to_json(const GridFunction& f) {
    nlohmann::ordered_json j;
    j["domain"] = {{"n", f.domain.dim}, {"L", f.domain.half_extent}, {"N", f.domain.cells_per_axis}};
    j["samples"] = std::vector<double>(f.samples.data(), f.samples.data() + f.samples.size());
    if (f.nonneg) j["weight"] = true;
    return j.dump();
}

GridFunction gridfunction_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    DomainSpec d(j["domain"]["n"].get<int>(), j["domain"]["L"].get<double>(),
                 j["domain"]["N"].get<int>());
    auto v = j["samples"].get<std::vector<double>>();
    Array s = Eigen::Map<const Array>(v.data(), static_cast<long>(v.size()));
    bool w = j.value("weight", false);
    return GridFunction(d, std::move(s), w);
}

}  // namespace lplab
