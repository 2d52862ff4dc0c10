#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sigfield/geometry.hpp"
#include "sigfield/measure.hpp"

namespace sigfield {

// A generator set A_x: the event attached to one observation.
struct GeneratorSet {
    enum class Kind { CornerBox, Ball, HalfspaceThreshold };

    Kind kind = Kind::CornerBox;
    std::vector<double> point;  // corner point or ball center
    double radius = 0.0;
    int coord = 0;
    double threshold = 0.0;

    static GeneratorSet corner_box(std::vector<double> p);
    static GeneratorSet ball(std::vector<double> center, double radius);
    static GeneratorSet halfspace_threshold(int coord, double threshold);

    // Closed on the "<=" side (corner boxes and thresholds); balls are open,
    // matching B_r(x) = { z : |z - x| < r }.
    bool contains(std::span<const double> x) const;
    // One-sided in a single coordinate (cells of such generators in 1D are
    // provably intervals).
    bool one_sided() const { return kind != Kind::Ball; }
};

struct CellStats {
    double measure_estimate = 0.0;
    double diameter_estimate = 0.0;
    std::size_t sample_count = 0;
    std::vector<double> representative;
};

// The finest partition of sigma(A_1, ..., A_n) represented by membership
// signatures over a Monte Carlo reference sample.  Cells with no reference
// point (mu-null up to MC resolution) are omitted.  Immutable after build;
// refined() produces the partition with one more generator.
class SignaturePartition {
public:
    static constexpr std::size_t kRetainedPerCell = 256;

    static SignaturePartition build(std::vector<GeneratorSet> generators,
                                    const MeasureSpec& spec, std::size_t reference_size,
                                    SeededStream stream);

    SignaturePartition refined(const GeneratorSet& g) const&;
    SignaturePartition refined(const GeneratorSet& g) &&;

    std::size_t cell_count() const { return cells_.size(); }
    std::size_t generator_count() const { return generators_.size(); }
    const std::vector<GeneratorSet>& generators() const { return generators_; }
    const PointSet& reference_points() const { return *points_; }
    std::uint32_t cell_of_point(std::size_t point_index) const { return point_cell_[point_index]; }

    CellStats cell_stats(std::size_t cell) const;
    double cell_measure(std::size_t cell) const;
    double cell_diameter(std::size_t cell) const;
    std::size_t cell_size(std::size_t cell) const;
    // Membership bit of `cell` in generator g (from the stored signature).
    bool signature_bit(std::size_t cell, std::size_t generator) const;

    // Evaluates the generators at x and looks the signature up; empty when
    // the signature matches no reference point (an omitted zero-mass cell).
    std::optional<std::size_t> cell_of(std::span<const double> x) const;

    // sum_cells mu(A) * diam(A), both factors estimated from the reference
    // sample (exact interval geometry in 1D under one-sided generators).
    double diameter_bound() const;

private:
    struct Cell {
        std::vector<std::uint64_t> signature;  // packed membership bits
        std::uint32_t count = 0;
        std::vector<std::uint32_t> retained;  // first-K point indices
        double diameter = 0.0;
    };

    void rebuild_cells_from_assignment(const std::vector<std::uint32_t>& new_cell_of_point,
                                       std::size_t new_cell_count,
                                       const std::vector<std::uint64_t>& template_signatures,
                                       std::size_t signature_words);
    void recompute_cell_geometry(Cell& cell) const;
    std::vector<std::uint64_t> signature_of(std::span<const double> x) const;

    std::vector<GeneratorSet> generators_;
    std::shared_ptr<const PointSet> points_;
    std::vector<std::uint32_t> point_cell_;
    std::vector<Cell> cells_;
    Box domain_;

    struct SigHash {
        std::size_t operator()(const std::vector<std::uint64_t>& v) const;
    };
    std::unordered_map<std::vector<std::uint64_t>, std::size_t, SigHash> cell_index_;
};

// The symmetric axis-aligned grid sigma-field: every coordinate of every
// sample splits the whole box.  Geometry is exact.
class GridPartition {
public:
    static GridPartition from_points(const PointSet& points, Box domain);
    static GridPartition from_splits(Box domain, std::vector<std::vector<double>> splits);

    int dim() const { return domain_.dim(); }
    const Box& domain() const { return domain_; }
    const std::vector<double>& splits(int coord) const { return splits_[coord]; }

    // Number of cells = prod_i (splits_i + 1); guarded against overflow.
    double cell_count() const;

    // Per-coordinate interval indices; left-closed at splits (x <= split).
    std::vector<int> cell_of(std::span<const double> x) const;
    int interval_of(int coord, double x) const;

    Box cell_box(const std::vector<int>& cell) const;
    std::vector<double> upper_corner(const std::vector<int>& cell) const;
    double cell_mass(const MeasureSpec& spec, const std::vector<int>& cell) const;

    // Exact sum_cells mu(A) diam(A) by enumeration (product measures).
    // Throws ConfigError above the enumeration cap; large grids are
    // estimated via estimate_diameter_bound.
    double diameter_bound(const MeasureSpec& spec, double max_cells = 8e6) const;
    // Unbiased MC estimate of the same sum as E_X[diam(cell(X))].
    std::pair<double, double> estimate_diameter_bound(const MeasureSpec& spec, std::size_t n,
                                                      SeededStream stream) const;

private:
    Box domain_;
    std::vector<std::vector<double>> splits_;
};

// Spec-facing construction helpers.
SignaturePartition build_corner_partition(const PointSet& points, const MeasureSpec& spec,
                                          std::size_t reference_size, SeededStream stream);
SignaturePartition build_ball_partition(const PointSet& centers,
                                        const std::vector<double>& radii,
                                        const MeasureSpec& spec, std::size_t reference_size,
                                        SeededStream stream);
GridPartition build_symmetric_grid(const PointSet& points, Box domain);

}  // namespace sigfield
