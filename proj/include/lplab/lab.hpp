#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lplab/dyadic.hpp"
#include "lplab/grid.hpp"
#include "lplab/orlicz.hpp"
#include "lplab/sqfn.hpp"
#include "lplab/weights.hpp"

namespace lplab {

/// Seedable 64-bit generator with splitmix-derived stream splitting, so corpus
/// cases draw from isolated deterministic streams.
class LabRng {
  public:
    explicit LabRng(std::uint64_t seed);
    LabRng split(std::uint64_t stream) const;
    double uniform(double lo, double hi);
    std::uint64_t integer(std::uint64_t n);  // in [0, n)

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t state_ = 0;
    std::uint64_t next();
};

/// Windowed trigonometric polynomial, supported in `support` when given.
GridFunction corpus_function(const DomainSpec& d, LabRng& rng, const Box* support = nullptr);

/// One manifest entry of the weight corpus.
struct WeightSpec {
    std::string kind;  // "power", "checker", "a1"
    double a = 0.0, b = 0.0;
    std::uint64_t seed = 0;
};

GridFunction corpus_weight(const DomainSpec& d, const WeightSpec& spec,
                           const std::vector<ShiftedDyadicGrid>& grids);

/// Rotating default manifest used by the experiments.
std::vector<WeightSpec> default_weight_manifest(int count, double p, int n, LabRng& rng);

struct FitResult {
    double slope = 0.0;  // loglog_line: exponent; gauss_decay: decay rate (>0)
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares in transformed coordinates. loglog_line: log y on log x.
/// gauss_decay: log y on x^2, slope reported as the positive decay rate.
FitResult fit_model(const std::vector<std::pair<double, double>>& points,
                    const std::string& model);

struct ExperimentConfig {
    std::string experiment;
    DomainSpec domain{1, 1.0, 256};
    std::string kernel_id = "cancel:2:1";
    std::vector<double> exponents{2.0, 2.0};
    double alpha = 1.0;
    double lambda = 5.0;
    double r = 1.0;
    double eta = 1.0;  // entropy gauge
    int cases = 20;
    int t_nodes = 64;
    std::uint64_t seed = 1;
    double tol = 1e-9;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct CaseResult {
    std::string inputs;
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CaseResult> cases;
    double observed_constant = 0.0;
    FitResult fit;
    bool pass = false;
    std::vector<double> tail_bounds;
    std::string notes;
    double wall_ms = 0.0;

    /// include_wall=false gives the reproducibility view (deterministic bytes).
    std::string to_json(bool include_wall = true) const;
    std::string to_csv() const;  // one row per case
};

class UnknownExperiment : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class HypothesisViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> experiment_ids();

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config);

}  // namespace lplab
