#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigfield/corner2d.hpp"
#include "sigfield/measure.hpp"
#include "sigfield/numerics.hpp"
#include "sigfield/partition.hpp"
#include "sigfield/resolution.hpp"

namespace sigfield {

enum class Scheme { SymmetricGrid, AsymmetricCorner };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// A test function with a declared Lipschitz constant.
class LipschitzWitness {
public:
    enum class Kind { Coordinate, RandomLinear, DistanceToPoint, Table1D, Callable };

    static LipschitzWitness coordinate(int coord);
    static LipschitzWitness random_linear(std::vector<double> unit_direction);
    static LipschitzWitness distance_to(std::vector<double> point);
    // Piecewise-linear interpolation of equally spaced values on [0,1].
    static LipschitzWitness table_1d(std::vector<double> values);
    static LipschitzWitness callable(std::function<double(std::span<const double>)> fn,
                                     double lipschitz, std::string name);
    static LipschitzWitness constant(double value);

    Kind kind() const { return kind_; }
    double lipschitz() const { return lipschitz_; }
    const std::string& name() const { return name_; }
    double evaluate(std::span<const double> x) const;

    bool is_linear() const {
        return kind_ == Kind::Coordinate || kind_ == Kind::RandomLinear;
    }
    // Linear witnesses as a direction vector (coordinate basis or the unit
    // direction).
    std::vector<double> direction(int dim) const;
    int coord() const { return coord_; }

private:
    Kind kind_ = Kind::Coordinate;
    int coord_ = 0;
    std::vector<double> direction_;
    std::vector<double> point_;
    std::vector<double> table_;
    std::function<double(std::span<const double>)> fn_;
    double lipschitz_ = 1.0;
    std::string name_;
};

// Coordinate projections, 8 random unit directions, and one random
// distance-to-point witness; the declared family whose max lower-bounds the
// Lipschitz supremum.
std::vector<LipschitzWitness> default_witness_family(int d, SeededStream stream);

// Empirical Lipschitz check on random pairs.
bool validate_lipschitz(const LipschitzWitness& f, const Box& domain, std::size_t pairs,
                        SeededStream stream, double slack = 1e-12);

// A conditional expectation E[f | partition]: per-cell values plus the
// partition needed to evaluate them.  Holds non-owning partition handles;
// valid while the source partition is alive.
class PiecewiseConstant {
public:
    double evaluate(std::span<const double> x) const;
    const std::vector<double>& values() const { return values_; }

private:
    friend PiecewiseConstant project(const GridPartition&, const LipschitzWitness&,
                                     const MeasureSpec&, double);
    friend PiecewiseConstant project(const SignaturePartition&, const LipschitzWitness&);
    friend PiecewiseConstant project(const CornerPartitionExact&, const LipschitzWitness&);

    enum class Rep { Grid, Signature, Corner };
    Rep rep_ = Rep::Grid;
    const GridPartition* grid_ = nullptr;
    const SignaturePartition* signature_ = nullptr;
    const CornerPartitionExact* corner_ = nullptr;
    std::vector<double> values_;  // flat grid index / cell id
};

// Per-cell conditional means of f.  Grid cells with zero mass take the value
// of the nearest (by center) nonempty cell; such cells carry no L1 weight.
PiecewiseConstant project(const GridPartition& partition, const LipschitzWitness& f,
                          const MeasureSpec& spec, double max_cells = 8e6);
PiecewiseConstant project(const SignaturePartition& partition, const LipschitzWitness& f);
PiecewiseConstant project(const CornerPartitionExact& partition, const LipschitzWitness& f);

// || E[f|partition] - f ||_{L1(mu)}.  Closed form (zero std error) for
// coordinate projections on grids under uniform measure; MC otherwise.
McEstimate l1_loss(const GridPartition& partition, const LipschitzWitness& f,
                   const MeasureSpec& spec, std::size_t samples, SeededStream stream);
McEstimate l1_loss(const CornerPartitionExact& partition, const LipschitzWitness& f,
                   const MeasureSpec& spec, std::size_t samples, SeededStream stream);
// Estimated over the partition's own reference sample.
McEstimate l1_loss(const SignaturePartition& partition, const LipschitzWitness& f);

// sum of squared order-statistic gaps over 4, with 0 and 1 appended: the
// exact 1D loss of f(x)=x under Unif[0,1] for the symmetric partition.
double exact_loss_1d_symmetric(std::vector<double> sample_coords);

struct RatePoint {
    std::size_t n = 0;
    double mean_loss = 0.0;
    double loss_se = 0.0;
    double mean_diam_bound = 0.0;
    double diam_se = 0.0;
};

struct RateTrialRow {
    std::size_t trial = 0;
    std::size_t n = 0;
    double max_loss = 0.0;
    double loss_mc_se = 0.0;
    double diam_bound = 0.0;
    double diam_mc_se = 0.0;
};

struct RateReport {
    Scheme scheme = Scheme::SymmetricGrid;
    int d = 1;
    std::vector<RatePoint> points;
    SlopeFit slope;          // log mean loss vs log n, largest decade only
    double lipschitz_bound = 1.0;
    std::vector<RateTrialRow> trial_rows;  // populated when requested
};

struct RateOptions {
    std::size_t trials = 100;
    std::size_t eval_samples = 4096;
    std::size_t reference_size = 20000;  // signature fallback (d >= 3 corner)
    int threads = 1;
    bool keep_trial_rows = false;
};

// Builds the scheme's partition along a growing per-trial sample path and
// records the witness-max loss and the certified diameter bound at each
// schedule point.
RateReport rate_experiment(Scheme scheme, int d, const MeasureSpec& spec,
                           const std::vector<LipschitzWitness>& witnesses,
                           const std::vector<std::size_t>& schedule, const RateOptions& options,
                           SeededStream stream);

}  // namespace sigfield
