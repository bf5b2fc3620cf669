#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lplab {

using Array = Eigen::ArrayXd;

/// Truncated box domain [-L, L)^n sampled on a uniform grid of N cells per axis.
struct DomainSpec {
    int dim = 1;           // n, 1 or 2
    double half_extent = 1.0;  // L
    int cells_per_axis = 256;  // N, power of two

    DomainSpec() = default;
    DomainSpec(int n, double L, int N) : dim(n), half_extent(L), cells_per_axis(N) {
        validate();
    }

    void validate() const;

    double cell_width() const { return 2.0 * half_extent / cells_per_axis; }
    long total_cells() const {
        long c = cells_per_axis;
        return dim == 1 ? c : c * c;
    }
    double measure() const { return std::pow(2.0 * half_extent, dim); }

    // Cell center along one axis.
    double center(int i) const { return -half_extent + (i + 0.5) * cell_width(); }

    long index(int ix, int iy = 0) const {
        return dim == 1 ? ix : ix + static_cast<long>(cells_per_axis) * iy;
    }

    bool operator==(const DomainSpec& o) const {
        return dim == o.dim && half_extent == o.half_extent &&
               cells_per_axis == o.cells_per_axis;
    }
};

/// Axis-aligned half-open box [lo, hi) in at most two dimensions.
struct Box {
    int dim = 1;
    std::array<double, 2> lo{{0.0, 0.0}};
    std::array<double, 2> hi{{0.0, 0.0}};

    static Box interval(double a, double b) { return Box{1, {{a, 0.0}}, {{b, 0.0}}}; }
    static Box rect(double ax, double bx, double ay, double by) {
        return Box{2, {{ax, ay}}, {{bx, by}}};
    }

    double measure() const {
        double m = 1.0;
        for (int d = 0; d < dim; ++d) m *= std::max(0.0, hi[d] - lo[d]);
        return m;
    }

    Box intersect(const Box& o) const {
        Box r = *this;
        for (int d = 0; d < dim; ++d) {
            r.lo[d] = std::max(lo[d], o.lo[d]);
            r.hi[d] = std::min(hi[d], o.hi[d]);
        }
        return r;
    }

    bool contains_point(const std::array<double, 2>& x) const {
        for (int d = 0; d < dim; ++d)
            if (x[d] < lo[d] || x[d] >= hi[d]) return false;
        return true;
    }

    bool contains_box(const Box& o) const {
        for (int d = 0; d < dim; ++d)
            if (o.lo[d] < lo[d] - 1e-12 || o.hi[d] > hi[d] + 1e-12) return false;
        return true;
    }
};

/// Piecewise-constant sampled function on a DomainSpec; extended by zero
/// outside the box. Immutable by convention after construction.
struct GridFunction {
    DomainSpec domain;
    Array samples;   // size N^n, linear index ix + N*iy
    bool nonneg = false;  // weight flag

    GridFunction() = default;
    GridFunction(const DomainSpec& d, Array s, bool weight = false)
        : domain(d), samples(std::move(s)), nonneg(weight) {
        if (samples.size() != domain.total_cells())
            throw std::invalid_argument("GridFunction: sample count mismatch");
        if (!samples.isFinite().all())
            throw std::invalid_argument("GridFunction: non-finite sample");
    }

    static GridFunction constant(const DomainSpec& d, double c, bool weight = false) {
        return GridFunction(d, Array::Constant(d.total_cells(), c), weight);
    }

    double operator[](long i) const { return samples[i]; }
    double cell_measure() const { return std::pow(domain.cell_width(), domain.dim); }

    Box cell_box(long i) const {
        int N = domain.cells_per_axis;
        double h = domain.cell_width(), L = domain.half_extent;
        int ix = static_cast<int>(i % N);
        Box b;
        b.dim = domain.dim;
        b.lo[0] = -L + ix * h;
        b.hi[0] = b.lo[0] + h;
        if (domain.dim == 2) {
            int iy = static_cast<int>(i / N);
            b.lo[1] = -L + iy * h;
            b.hi[1] = b.lo[1] + h;
        }
        return b;
    }

    std::array<double, 2> cell_center(long i) const {
        int N = domain.cells_per_axis;
        std::array<double, 2> c{{0.0, 0.0}};
        c[0] = domain.center(static_cast<int>(i % N));
        if (domain.dim == 2) c[1] = domain.center(static_cast<int>(i / N));
        return c;
    }
};

/// Overlap measure of [a,b) with each grid cell along one axis.
/// Returns first overlapped cell index and per-cell lengths.
struct AxisOverlap {
    int first = 0;
    Eigen::ArrayXd lengths;  // may be empty
};
AxisOverlap axis_overlap(const DomainSpec& d, double a, double b);

/// (value, overlap-measure) pairs of f on B; the atoms behind medians,
/// rearrangements and Orlicz averages.
std::vector<std::pair<double, double>> box_value_masses(const GridFunction& f, const Box& B);

double integral(const GridFunction& f);
double box_integral(const GridFunction& f, const Box& B);
double box_average(const GridFunction& f, const Box& B);

/// Weighted box average fint_B f dmu with dmu = w dx; denominator w(B).
double box_average_weighted(const GridFunction& f, const GridFunction& w, const Box& B);

double lp_norm(const GridFunction& f, double p, const GridFunction* w = nullptr);
double weak_lp_norm(const GridFunction& f, double p, const GridFunction* w = nullptr);

double ess_inf_box(const GridFunction& f, const Box& B);
double ess_sup_box(const GridFunction& f, const Box& B);

// Pointwise algebra helpers; all pure.
GridFunction gf_map(const GridFunction& f, const std::function<double(double)>& fn);
GridFunction gf_product(const GridFunction& a, const GridFunction& b);
GridFunction gf_pow(const GridFunction& f, double e, bool weight = false);

// JSON serialization {domain:{n,L,N}, samples:[...]}; exact round-trip.
std::string to_json(const GridFunction& f);
GridFunction gridfunction_from_json(const std::string& text);

}  // namespace lplab
