#pragma once

#include <cstdint>
#include <vector>

#include "sigfield/measure.hpp"

namespace sigfield {

// One refinement level: sorted cut points of F_k and the conditional mean
// (barrier value) and mass of each positive-mass cell.
struct BarrierLevel {
    std::vector<double> cuts;
    std::vector<double> values;  // strictly increasing
    std::vector<double> masses;  // aligned with values
};

// A filtration of 1D cut points with per-level barriers for a centered
// target measure.  Level 0 is the trivial sigma-field (single barrier at the
// mean, 0).
class BarrierSequence {
public:
    BarrierSequence(MeasureSpec target, std::vector<BarrierLevel> levels)
        : target_(std::move(target)), levels_(std::move(levels)) {}

    const MeasureSpec& target() const { return target_; }
    std::size_t depth() const { return levels_.size() - 1; }
    const BarrierLevel& level(std::size_t k) const { return levels_.at(k); }

    // E[(E[X | F_k])^2], exact from level-k masses and values; equals the
    // expected stopping time of the embedded chain at depth k.
    double projected_second_moment(std::size_t k) const;

private:
    MeasureSpec target_;
    std::vector<BarrierLevel> levels_;
};

// Conditional means per cell of the cut partition; zero-mass cells dropped.
// Requires a centered spec (mean within 1e-9) with finite second moment.
BarrierLevel barriers_from_cuts(const MeasureSpec& spec, std::vector<double> cuts);

// Dubins' construction: each level's barrier values become the next level's
// cut points.  Point-mass cells stop splitting (cut deduplication at 1e-12).
BarrierSequence dubins_levels(const MeasureSpec& spec, std::size_t depth);

// Cut points are iid draws from split_source (which must support-cover the
// target); barriers recomputed per level against the target.
BarrierSequence randomized_levels(const MeasureSpec& spec, const MeasureSpec& split_source,
                                  std::size_t depth, SeededStream stream);

// Exact distributional skeleton of (B_{T_0}, B_{T_1}, ...): the chain sits
// on a barrier value and moves to the bracketing pair of the next level with
// the mean-preserving two-point distribution; the accumulated duration adds
// the Brownian two-barrier exit identity (v-a)(b-v).
struct EmbeddedChain {
    double value = 0.0;
    std::size_t level = 0;
    double duration = 0.0;
};

EmbeddedChain chain_step(EmbeddedChain chain, const BarrierSequence& seq, SeededStream& stream);

struct DepthSummary {
    std::size_t depth = 0;
    double mean_duration = 0.0;
    double duration_se = 0.0;
    double exact_projected_second_moment = 0.0;
};

struct EmbeddingResult {
    std::vector<double> terminal_values;  // chain order
    double mean_duration = 0.0;
    double duration_se = 0.0;
    std::vector<DepthSummary> by_depth;
};

// Runs `chains` independent chains to the deepest level.  Chains are chunked
// deterministically, so results are identical for any thread count.
EmbeddingResult run_embedding(const BarrierSequence& seq, std::size_t chains,
                              SeededStream stream, int threads = 1);

struct PathSimConfig {
    double dt = 1e-4;
    double horizon = 10.0;
    SeededStream stream;
};

struct LevelHit {
    std::size_t level = 0;
    double time = 0.0;
    double value = 0.0;
};

struct PathSimResult {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<LevelHit> hits;
    bool complete = false;  // all levels hit before the horizon
};

// Euler-discretized Brownian path with interpolated barrier crossings;
// biased by O(sqrt(dt)) in hitting detection and used for figure
// reproduction only (the embedded chain is the exact route).
PathSimResult simulate_continuous(const BarrierSequence& seq, const PathSimConfig& config);

// W1 between the empirical measure of `samples` and spec, via the average
// quantile gap at the midpoints (i - 1/2) / N.
double wasserstein1(std::vector<double> samples, const MeasureSpec& spec);

}  // namespace sigfield
