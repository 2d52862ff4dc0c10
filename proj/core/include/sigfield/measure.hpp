#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigfield/geometry.hpp"
#include "sigfield/stream.hpp"

namespace sigfield {

enum class MeasureKind {
    UniformBox,
    ProductDensity,
    DiscreteAtoms,
    Gaussian,
    TruncatedGaussian,
};

// A sampleable probability measure on a box in R^d (or on R for the 1D
// kinds), with exact per-coordinate CDFs, 1D conditional means on intervals,
// and analytic moments where available.
//
// gamma() is the density-ratio bound relative to the uniform measure on the
// domain box: gamma^{-1} <= relative density <= gamma everywhere on the
// domain, for the absolutely continuous kinds.
class MeasureSpec {
public:
    static MeasureSpec uniform_box(Box domain);
    static MeasureSpec uniform(double lo, double hi);  // 1D convenience
    // Per-coordinate piecewise-constant densities on equal-width bins over
    // the domain box.  Each table must integrate to 1 over its coordinate
    // range (validated to 1e-8); see normalized_table().
    static MeasureSpec product_density(Box domain, std::vector<std::vector<double>> tables);
    static MeasureSpec discrete_atoms(PointSet atoms, std::vector<double> weights);
    static MeasureSpec discrete_atoms_1d(std::vector<double> locations, std::vector<double> weights);
    static MeasureSpec gaussian(double mean, double stddev);
    static MeasureSpec truncated_gaussian(double mean, double stddev, double lo, double hi);

    // Rescales raw density values so their piecewise-constant density over
    // [lo, hi] integrates to 1.
    static std::vector<double> normalized_table(std::vector<double> values, double lo, double hi);

    MeasureKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }
    double gamma() const { return gamma_; }
    bool is_product() const;
    bool has_bounded_domain() const;
    std::string describe() const;

    // n iid samples; bit-identical for identical (spec, n, stream).
    PointSet sample(std::size_t n, SeededStream stream) const;

    // E[X | a < X <= b] for 1D kinds; throws EmptyConditioningError when
    // the interval carries no mass.
    double conditional_mean(double a, double b) const;
    // mu((a, b]) for 1D kinds.
    double interval_mass(double a, double b) const;
    double mean() const;           // 1D
    double second_moment() const;  // 1D
    double cdf(double x) const;    // 1D
    double quantile(double p) const;  // 1D, p in (0,1)

    // mu(box) with half-open semantics, exact for every built-in kind.
    double measure_of_box(const Box& box) const;

    // Per-coordinate CDF for the product kinds (uniform-box/product-density).
    double coord_cdf(int coord, double x) const;
    // Conditional mean of coordinate `coord` given it lies in (a, b].
    double coord_conditional_mean(int coord, double a, double b) const;
    // Marginal density of coordinate `coord` at x (product kinds).
    double coord_density(int coord, double x) const;

    // Support endpoints for 1D kinds (atoms: min/max location).
    double support_lo() const;
    double support_hi() const;
    // True when the support of `other` is contained in this measure's
    // support (decidable for all built-in kind pairs).
    bool support_covers(const MeasureSpec& other) const;

    // Discrete accessors (valid for DiscreteAtoms).
    const PointSet& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

    double gauss_mean() const { return mean_param_; }
    double gauss_stddev() const { return stddev_param_; }

private:
    MeasureSpec() = default;
    void validate() const;

    MeasureKind kind_ = MeasureKind::UniformBox;
    int dim_ = 1;
    Box domain_;
    double gamma_ = 1.0;

    // product-density
    std::vector<std::vector<double>> tables_;   // density values per bin
    std::vector<std::vector<double>> cum_;      // cumulative bin masses

    // discrete
    PointSet atoms_;
    std::vector<double> weights_;
    std::vector<double> cum_weights_;
    std::vector<std::size_t> sorted_order_;  // 1D atoms sorted by location

    // gaussian / truncated gaussian
    double mean_param_ = 0.0;
    double stddev_param_ = 1.0;
    double trunc_lo_ = 0.0;
    double trunc_hi_ = 0.0;
};

enum class RadiusKind { Uniform, Exponential, Discrete };

// Distribution of ball radii.  The uniform and exponential kinds place
// positive mass on (0, eps) for every eps > 0 by construction; the discrete
// kind exists to exercise the fixed-radius failure mode.
class RadiusSpec {
public:
    static RadiusSpec uniform(double r_max);
    static RadiusSpec exponential(double rate);
    static RadiusSpec discrete(std::vector<double> values, std::vector<double> weights);

    RadiusKind kind() const { return kind_; }
    double sample(SeededStream& stream) const;
    std::string describe() const;

private:
    RadiusKind kind_ = RadiusKind::Uniform;
    double r_max_ = 1.0;
    double rate_ = 1.0;
    std::vector<double> values_;
    std::vector<double> cum_weights_;
};

}  // namespace sigfield
