#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

/// Shifted dyadic grid D^j = {2^{-k}([0,1)^n + l + (-1)^k j/3)} clipped to the
/// domain box. Shift index j in {0,1,2}^n.
struct ShiftedDyadicGrid {
    DomainSpec domain;
    std::array<int, 2> shift{{0, 0}};  // j per axis
    int k_min = 0;                     // coarsest level (largest cubes)
    int k_max = 0;                     // finest level

    ShiftedDyadicGrid() = default;
    ShiftedDyadicGrid(const DomainSpec& d, std::array<int, 2> j);
    ShiftedDyadicGrid(const DomainSpec& d, std::array<int, 2> j, int kmin, int kmax);

    double shift_at_level(int k, int axis) const {
        return (k % 2 == 0 ? 1.0 : -1.0) * shift[axis] / 3.0;
    }
};

struct DyadicCube {
    const ShiftedDyadicGrid* grid = nullptr;
    int level = 0;
    std::array<long, 2> pos{{0, 0}};  // lattice position l per axis

    double side() const { return std::ldexp(1.0, -level); }

    /// Unclipped geometric box.
    Box raw_box() const;
    /// Box clipped to the domain; all averages/measures use this.
    Box box() const;
    double measure() const { return box().measure(); }

    bool contains(const DyadicCube& other) const;  // same grid, nested test
    std::vector<DyadicCube> children() const;
    std::optional<DyadicCube> parent() const;

    bool operator<(const DyadicCube& o) const {
        if (level != o.level) return level < o.level;
        if (pos[0] != o.pos[0]) return pos[0] < o.pos[0];
        return pos[1] < o.pos[1];
    }
    bool operator==(const DyadicCube& o) const {
        return level == o.level && pos == o.pos;
    }
};

std::vector<DyadicCube> enumerate_cubes(const ShiftedDyadicGrid& g, int k_lo, int k_hi);
std::vector<DyadicCube> enumerate_cubes(const ShiftedDyadicGrid& g);
std::vector<DyadicCube> level_cubes(const ShiftedDyadicGrid& g, int k);

/// All 3^n shifted grids over a domain, shared level window.
std::vector<ShiftedDyadicGrid> all_shifted_grids(const DomainSpec& d);

struct SparseFamily {
    const ShiftedDyadicGrid* grid = nullptr;
    std::vector<DyadicCube> cubes;
    double eta = 0.5;
};

struct SparseCheck {
    bool pass = false;
    double min_ratio = 0.0;  // min |E_Q|/|Q|
    std::optional<DyadicCube> worst;
};

/// Greedy E_Q = Q minus maximal proper S-descendants; checks |E_Q| >= eta |Q|.
SparseCheck verify_sparse(const SparseFamily& fam);

/// Measure-weighted lower median of f on Q.
double median(const GridFunction& f, const DyadicCube& Q);
double median_box(const GridFunction& f, const Box& B);

/// Decreasing rearrangement f*(t) over the whole domain (f is zero outside).
double rearrangement(const GridFunction& f, double t);
/// Rearrangement of f restricted to a box: ((f 1_B))*(t).
double rearrangement_box(const GridFunction& f, const Box& B, double t);

/// Local mean oscillation omega_lambda(f;Q) by the shortest-window algorithm.
double local_mean_oscillation(const GridFunction& f, const DyadicCube& Q, double lambda);
double local_mean_oscillation_box(const GridFunction& f, const Box& B, double lambda);

struct LernerHytonen {
    double median_value = 0.0;
    SparseFamily family;                     // 1/2-sparse
    std::vector<double> coefficients;        // omega_{2^{-n-2}}(f;Q) per cube
    int refinements = 0;                     // threshold halvings used
};

class SelfVerificationFailed : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Pointwise decomposition |f - m_f(Q0)| <= 2 sum omega 1_Q, self-verified at
/// cell centers before returning.
LernerHytonen lerner_hytonen(const GridFunction& f, const DyadicCube& Q0);

/// Carleson packing constant: max over enumerated Q0 of
/// (sum_{Q subset Q0} a_Q) / w(Q0). Lower bound of the true supremum.
double carleson_constant(const std::map<DyadicCube, double>& a, const GridFunction& w,
                         const ShiftedDyadicGrid& grid);

/// M_delta^sharp over the enumerated cubes of the given grids; inner infimum
/// realized at the median of |f|^delta on Q.
GridFunction sharp_maximal(const GridFunction& f, double delta,
                           const std::vector<ShiftedDyadicGrid>& grids);

/// Multilinear maximal: per cell x, sup over enumerated cubes containing x of
/// prod_i <|f_i|>_Q^{e_i}, slot `skip` omitted if set. Covers M, the hybrid
/// maximal operators, and the power-average variants.
GridFunction maximal(const std::vector<const GridFunction*>& fs,
                     const std::vector<double>& exponents,
                     const std::vector<ShiftedDyadicGrid>& grids,
                     std::optional<int> skip = std::nullopt);

/// Convenience: Hardy-Littlewood maximal of a single function.
GridFunction hl_maximal(const GridFunction& f, const std::vector<ShiftedDyadicGrid>& grids);

/// Sparse operator A_S^r(f1..fm) = (sum_{Q in S} prod <|f_i|>_Q^r 1_Q)^{1/r}.
GridFunction sparse_operator(const SparseFamily& S, double r,
                             const std::vector<const GridFunction*>& fs);

// SparseFamily serialization: JSON list of {grid_shift, level, position}.
std::string to_json(const SparseFamily& fam);
SparseFamily sparse_family_from_json(const std::string& text, const ShiftedDyadicGrid& grid);

}  // namespace lplab
