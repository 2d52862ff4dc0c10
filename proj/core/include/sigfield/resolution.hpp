#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sigfield/corner2d.hpp"
#include "sigfield/measure.hpp"
#include "sigfield/partition.hpp"

namespace sigfield {

// An event to recover from empirical sigma-fields.
struct TargetEvent {
    enum class Kind { CornerBox, Ball, Predicate };

    Kind kind = Kind::CornerBox;
    std::vector<double> corner;  // A_q = { x : x <= q }
    std::vector<double> center;
    double radius = 0.0;
    std::function<bool(std::span<const double>)> predicate;
    std::string id;

    static TargetEvent corner_box(std::vector<double> q, std::string id = {});
    static TargetEvent ball(std::vector<double> center, double radius, std::string id = {});
    static TargetEvent membership(std::function<bool(std::span<const double>)> pred,
                                  std::string id = {});

    bool contains(std::span<const double> x) const;
    // Corner-box targets as a half-open box (domain.lo, q].
    Box as_box(const Box& domain) const;
};

struct BestApproximation {
    std::vector<std::uint8_t> in_union;  // per cell id
    double distance = 0.0;
};

// Closest-indicator rounding: A* = union of cells where the conditional
// probability of B is >= 1/2 (ties included).  Attains the minimum of
// mu(A triangle B) over all cell unions.
BestApproximation best_approximation(const SignaturePartition& partition,
                                     const TargetEvent& target);
BestApproximation best_approximation(const CornerPartitionExact& partition, const Box& target);
// Exact for box targets under product measures; enumerates cells, so the
// grid must be materializable.
BestApproximation best_approximation(const GridPartition& partition, const Box& target,
                                     const MeasureSpec& spec, double max_cells = 8e6);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// MC estimate of mu(A triangle B) from M fresh samples.
McEstimate symmetric_difference(const MeasureSpec& spec,
                                const std::function<bool(std::span<const double>)>& a,
                                const std::function<bool(std::span<const double>)>& b,
                                std::size_t samples, SeededStream stream);
// Exact for half-open boxes under any kind with exact box masses.
double symmetric_difference_boxes(const MeasureSpec& spec, const Box& a, const Box& b);

// Largest corner box A_r spanned by the samples dominated by q (the
// approximate-from-inside step); r is empty when no sample lies in A_q.
struct InnerBoxResult {
    std::optional<std::vector<double>> r;
    double empirical_target_mass = 0.0;  // mu_N(A_q)
    double empirical_inner_mass = 0.0;   // mu_N(A_r), equal by construction
};
InnerBoxResult inner_box_approx(const PointSet& samples, std::span<const double> q);

struct TracePoint {
    std::size_t n = 0;
    double mean_distance = 0.0;
    double std_error = 0.0;
};

struct ConvergenceTrace {
    std::string target_id;
    std::vector<TracePoint> points;
    std::size_t trials = 0;
    // Resolution floor of the reference-sample estimates (0 when exact).
    double mc_floor = 0.0;
};

struct TraceOptions {
    std::size_t trials = 50;
    std::size_t reference_size = 100000;  // signature path only
    int threads = 1;
};

// Corner-generator recovery traces along a growing sample path; one trace
// per target.  Uses exact staircase geometry for box targets under product
// measures in d <= 2, reference-sample estimates otherwise.
std::vector<ConvergenceTrace> monotone_convergence_trace(const MeasureSpec& spec,
                                                         const std::vector<TargetEvent>& targets,
                                                         const std::vector<std::size_t>& schedule,
                                                         const TraceOptions& options,
                                                         SeededStream stream);

// Ball-generator variant with radii drawn from radius_spec.
ConvergenceTrace ball_convergence_trace(const MeasureSpec& spec, const RadiusSpec& radius_spec,
                                        const TargetEvent& target,
                                        const std::vector<std::size_t>& schedule,
                                        const TraceOptions& options, SeededStream stream);

// The +-1 step function with sign flips at cell midpoints; its conditional
// expectation vanishes on every cell, so the L1 gap to itself stays 1 no
// matter how fine the cuts are.
struct AdversarialWitness {
    std::vector<double> boundaries;  // 0, cuts..., 1
    std::vector<double> cell_means;  // all exactly 0
    double loss = 0.0;               // exactly 1

    double evaluate(double x) const;
};
AdversarialWitness adversarial_witness(std::vector<double> cuts);

}  // namespace sigfield
