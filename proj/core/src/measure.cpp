#include "sigfield/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sigfield/errors.hpp"
#include "sigfield/numerics.hpp"

namespace sigfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_mass(double alpha, double beta) {
    // P(alpha < Z <= beta) for a standard normal, stable in both tails.
    if (alpha >= beta) return 0.0;
    if (alpha >= 0.0) return normal_cdf(-alpha) - normal_cdf(-beta);
    return normal_cdf(beta) - normal_cdf(alpha);
}

double gaussian_segment_mean(double m, double s, double a, double b) {
    const double alpha = (a - m) / s;
    const double beta = (b - m) / s;
    const double z = phi_mass(alpha, beta);
    if (!(z > 0.0)) throw EmptyConditioningError("conditioning interval has zero mass");
    const double pa = std::isinf(alpha) ? 0.0 : normal_pdf(alpha);
    const double pb = std::isinf(beta) ? 0.0 : normal_pdf(beta);
    double v = m + s * (pa - pb) / z;
    // Guard the one-ulp excursions on very narrow intervals.
    return std::clamp(v, std::max(a, -kInf), std::min(b, kInf));
}

}  // namespace

MeasureSpec MeasureSpec::uniform_box(Box domain) {
    MeasureSpec s;
    s.kind_ = MeasureKind::UniformBox;
    s.dim_ = domain.dim();
    s.domain_ = std::move(domain);
    s.gamma_ = 1.0;
    s.validate();
    return s;
}

MeasureSpec MeasureSpec::uniform(double lo, double hi) {
    return uniform_box(Box::interval(lo, hi));
}

MeasureSpec MeasureSpec::product_density(Box domain, std::vector<std::vector<double>> tables) {
    MeasureSpec s;
    s.kind_ = MeasureKind::ProductDensity;
    s.dim_ = domain.dim();
    s.domain_ = std::move(domain);
    if (static_cast<int>(tables.size()) != s.dim_)
        throw ConfigError("product-density: one table per coordinate required");
    s.tables_ = std::move(tables);
    s.cum_.resize(s.dim_);
    s.gamma_ = 1.0;
    for (int c = 0; c < s.dim_; ++c) {
        const auto& t = s.tables_[c];
        if (t.empty()) throw ConfigError("product-density: empty table");
        const double w = s.domain_.side(c) / static_cast<double>(t.size());
        double total = 0.0;
        double gamma_c = 1.0;
        auto& cum = s.cum_[c];
        cum.assign(t.size() + 1, 0.0);
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (!(t[j] > 0.0)) throw ConfigError("product-density: density must be positive");
            total += t[j] * w;
            cum[j + 1] = total;
            const double rel = t[j] * s.domain_.side(c);  // vs uniform on the side
            gamma_c = std::max({gamma_c, rel, 1.0 / rel});
        }
        if (std::abs(total - 1.0) > 1e-8)
            throw ConfigError("product-density: table does not integrate to 1");
        s.gamma_ *= gamma_c;
    }
    s.validate();
    return s;
}

MeasureSpec MeasureSpec::discrete_atoms(PointSet atoms, std::vector<double> weights) {
    MeasureSpec s;
    s.kind_ = MeasureKind::DiscreteAtoms;
    if (atoms.size() == 0) throw ConfigError("discrete-atoms: need at least one atom");
    if (atoms.size() != weights.size())
        throw ConfigError("discrete-atoms: atom/weight count mismatch");
    s.dim_ = atoms.dim;
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("discrete-atoms: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("discrete-atoms: weights must sum to 1");
    s.atoms_ = std::move(atoms);
    s.weights_ = std::move(weights);
    s.cum_weights_.resize(s.weights_.size());
    std::partial_sum(s.weights_.begin(), s.weights_.end(), s.cum_weights_.begin());
    s.cum_weights_.back() = 1.0;
    // Domain: bounding box of the atoms.
    std::vector<double> lo(s.dim_, kInf), hi(s.dim_, -kInf);
    for (std::size_t i = 0; i < s.atoms_.size(); ++i) {
        auto p = s.atoms_[i];
        for (int c = 0; c < s.dim_; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    s.domain_ = Box(std::move(lo), std::move(hi));
    if (s.dim_ == 1) {
        s.sorted_order_.resize(s.atoms_.size());
        std::iota(s.sorted_order_.begin(), s.sorted_order_.end(), std::size_t{0});
        std::sort(s.sorted_order_.begin(), s.sorted_order_.end(),
                  [&](std::size_t a, std::size_t b) { return s.atoms_[a][0] < s.atoms_[b][0]; });
    }
    return s;
}

MeasureSpec MeasureSpec::discrete_atoms_1d(std::vector<double> locations,
                                           std::vector<double> weights) {
    PointSet pts(1);
    pts.coords = std::move(locations);
    return discrete_atoms(std::move(pts), std::move(weights));
}

MeasureSpec MeasureSpec::gaussian(double mean, double stddev) {
    if (!(stddev > 0.0)) throw ConfigError("gaussian: stddev must be positive");
    MeasureSpec s;
    s.kind_ = MeasureKind::Gaussian;
    s.dim_ = 1;
    s.mean_param_ = mean;
    s.stddev_param_ = stddev;
    s.domain_ = Box({-kInf}, {kInf});
    return s;
}

MeasureSpec MeasureSpec::truncated_gaussian(double mean, double stddev, double lo, double hi) {
    if (!(stddev > 0.0)) throw ConfigError("truncated-gaussian: stddev must be positive");
    if (!(lo < hi)) throw ConfigError("truncated-gaussian: empty truncation interval");
    MeasureSpec s;
    s.kind_ = MeasureKind::TruncatedGaussian;
    s.dim_ = 1;
    s.mean_param_ = mean;
    s.stddev_param_ = stddev;
    s.trunc_lo_ = lo;
    s.trunc_hi_ = hi;
    s.domain_ = Box({lo}, {hi});
    // Relative density vs uniform on [lo, hi] is bounded by the pdf ratio.
    const double z = phi_mass((lo - mean) / stddev, (hi - mean) / stddev);
    if (!(z > 0.0)) throw ConfigError("truncated-gaussian: truncation mass is zero");
    const double len = hi - lo;
    double pdf_max = 0.0, pdf_min = kInf;
    const double mode = std::clamp(mean, lo, hi);
    pdf_max = normal_pdf((mode - mean) / stddev) / (stddev * z);
    pdf_min = std::min(normal_pdf((lo - mean) / stddev), normal_pdf((hi - mean) / stddev)) /
              (stddev * z);
    s.gamma_ = std::max(pdf_max * len, 1.0 / (pdf_min * len));
    return s;
}

std::vector<double> MeasureSpec::normalized_table(std::vector<double> values, double lo,
                                                  double hi) {
    const double w = (hi - lo) / static_cast<double>(values.size());
    double total = 0.0;
    for (double v : values) total += v * w;
    if (!(total > 0.0)) throw ConfigError("normalized_table: non-positive total");
    for (double& v : values) v /= total;
    return values;
}

void MeasureSpec::validate() const {
    if (dim_ < 1) throw ConfigError("measure: dimension must be >= 1");
    for (int c = 0; c < dim_; ++c)
        if (!(domain_.lo[c] < domain_.hi[c])) throw ConfigError("measure: empty domain side");
}

bool MeasureSpec::is_product() const {
    switch (kind_) {
        case MeasureKind::UniformBox:
        case MeasureKind::ProductDensity:
            return true;
        case MeasureKind::Gaussian:
        case MeasureKind::TruncatedGaussian:
            return dim_ == 1;
        case MeasureKind::DiscreteAtoms:
            return false;
    }
    return false;
}

bool MeasureSpec::has_bounded_domain() const {
    for (int c = 0; c < dim_; ++c)
        if (std::isinf(domain_.lo[c]) || std::isinf(domain_.hi[c])) return false;
    return true;
}

std::string MeasureSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case MeasureKind::UniformBox:
            os << "uniform";
            for (int c = 0; c < dim_; ++c) os << (c ? "x" : ":") << "[" << domain_.lo[c] << "," << domain_.hi[c] << "]";
            break;
        case MeasureKind::ProductDensity:
            os << "product-density:d=" << dim_ << ":gamma=" << gamma_;
            break;
        case MeasureKind::DiscreteAtoms:
            os << "atoms:" << atoms_.size();
            break;
        case MeasureKind::Gaussian:
            os << "gaussian:" << mean_param_ << ":" << stddev_param_;
            break;
        case MeasureKind::TruncatedGaussian:
            os << "tgauss:" << mean_param_ << ":" << stddev_param_ << ":[" << trunc_lo_ << ","
               << trunc_hi_ << "]";
            break;
    }
    return os.str();
}

PointSet MeasureSpec::sample(std::size_t n, SeededStream stream) const {
    PointSet out(dim_);
    out.reserve(n);
    switch (kind_) {
        case MeasureKind::UniformBox:
            for (std::size_t i = 0; i < n; ++i)
                for (int c = 0; c < dim_; ++c)
                    out.coords.push_back(domain_.lo[c] + stream.next_double() * domain_.side(c));
            break;
        case MeasureKind::ProductDensity:
            for (std::size_t i = 0; i < n; ++i) {
                for (int c = 0; c < dim_; ++c) {
                    const double u = stream.next_double();
                    const auto& cum = cum_[c];
                    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
                    const std::size_t j =
                        std::min(static_cast<std::size_t>(std::distance(cum.begin(), it)),
                                 cum.size() - 1) - 1;
                    const double w = domain_.side(c) / static_cast<double>(tables_[c].size());
                    const double edge = domain_.lo[c] + static_cast<double>(j) * w;
                    out.coords.push_back(edge + (u - cum[j]) / tables_[c][j]);
                }
            }
            break;
        case MeasureKind::DiscreteAtoms:
            for (std::size_t i = 0; i < n; ++i) {
                const double u = stream.next_double();
                const auto it = std::upper_bound(cum_weights_.begin(), cum_weights_.end(), u);
                const std::size_t j = std::min(
                    static_cast<std::size_t>(std::distance(cum_weights_.begin(), it)),
                    cum_weights_.size() - 1);
                out.push_back(atoms_[j]);
            }
            break;
        case MeasureKind::Gaussian:
            for (std::size_t i = 0; i < n; ++i)
                out.coords.push_back(mean_param_ + stddev_param_ * stream.next_normal());
            break;
        case MeasureKind::TruncatedGaussian: {
            const double alpha = (trunc_lo_ - mean_param_) / stddev_param_;
            const double beta = (trunc_hi_ - mean_param_) / stddev_param_;
            const double fa = normal_cdf(alpha);
            const double z = phi_mass(alpha, beta);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = stream.next_double();
                const double p = std::min(1.0 - 1e-16, fa + u * z);
                double x = mean_param_ + stddev_param_ * normal_quantile(p);
                out.coords.push_back(std::clamp(x, trunc_lo_, trunc_hi_));
            }
            break;
        }
    }
    return out;
}

double MeasureSpec::conditional_mean(double a, double b) const {
    if (dim_ != 1) throw ConfigError("conditional_mean: 1D measures only");
    if (!(a < b)) throw ConfigError("conditional_mean: need a < b");
    switch (kind_) {
        case MeasureKind::UniformBox: {
            const double lo = std::max(a, domain_.lo[0]);
            const double hi = std::min(b, domain_.hi[0]);
            if (!(hi > lo)) throw EmptyConditioningError("uniform: interval misses the support");
            return 0.5 * (lo + hi);
        }
        case MeasureKind::DiscreteAtoms: {
            double mass = 0.0, sum = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                const double x = atoms_[i][0];
                if (x > a && x <= b) {
                    mass += weights_[i];
                    sum += weights_[i] * x;
                }
            }
            if (!(mass > 0.0)) throw EmptyConditioningError("atoms: no atom in interval");
            return std::clamp(sum / mass, a, b);
        }
        case MeasureKind::Gaussian:
            return gaussian_segment_mean(mean_param_, stddev_param_, a, b);
        case MeasureKind::TruncatedGaussian: {
            const double lo = std::max(a, trunc_lo_);
            const double hi = std::min(b, trunc_hi_);
            if (!(hi > lo))
                throw EmptyConditioningError("truncated-gaussian: interval misses the support");
            return gaussian_segment_mean(mean_param_, stddev_param_, lo, hi);
        }
        case MeasureKind::ProductDensity:
            return coord_conditional_mean(0, a, b);
    }
    throw ConfigError("conditional_mean: unsupported kind");
}

double MeasureSpec::interval_mass(double a, double b) const {
    if (dim_ != 1) throw ConfigError("interval_mass: 1D measures only");
    if (!(a < b)) return 0.0;
    return cdf(b) - cdf(a);
}

double MeasureSpec::mean() const {
    if (dim_ != 1) throw ConfigError("mean: 1D measures only");
    switch (kind_) {
        case MeasureKind::UniformBox:
            return 0.5 * (domain_.lo[0] + domain_.hi[0]);
        case MeasureKind::DiscreteAtoms: {
            double s = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * atoms_[i][0];
            return s;
        }
        case MeasureKind::Gaussian:
            return mean_param_;
        case MeasureKind::TruncatedGaussian:
            return gaussian_segment_mean(mean_param_, stddev_param_, trunc_lo_, trunc_hi_);
        case MeasureKind::ProductDensity:
            return coord_conditional_mean(0, domain_.lo[0] - 1.0, domain_.hi[0]);
    }
    throw ConfigError("mean: unsupported kind");
}

double MeasureSpec::second_moment() const {
    if (dim_ != 1) throw ConfigError("second_moment: 1D measures only");
    switch (kind_) {
        case MeasureKind::UniformBox: {
            const double lo = domain_.lo[0], hi = domain_.hi[0];
            return (lo * lo + lo * hi + hi * hi) / 3.0;
        }
        case MeasureKind::DiscreteAtoms: {
            double s = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i)
                s += weights_[i] * atoms_[i][0] * atoms_[i][0];
            return s;
        }
        case MeasureKind::Gaussian:
            return mean_param_ * mean_param_ + stddev_param_ * stddev_param_;
        case MeasureKind::TruncatedGaussian: {
            const double m = mean_param_, s = stddev_param_;
            const double z = phi_mass((trunc_lo_ - m) / s, (trunc_hi_ - m) / s);
            auto integrand = [&](double x) {
                return x * x * normal_pdf((x - m) / s) / (s * z);
            };
            return adaptive_simpson(integrand, trunc_lo_, trunc_hi_, 1e-10, 60);
        }
        case MeasureKind::ProductDensity: {
            // Exact per-bin integral of x^2 against the table density.
            const auto& t = tables_[0];
            const double w = domain_.side(0) / static_cast<double>(t.size());
            double s = 0.0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double x0 = domain_.lo[0] + static_cast<double>(j) * w;
                const double x1 = x0 + w;
                s += t[j] * (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
            }
            return s;
        }
    }
    throw ConfigError("second_moment: unsupported kind");
}

double MeasureSpec::cdf(double x) const {
    if (dim_ != 1) throw ConfigError("cdf: 1D measures only");
    switch (kind_) {
        case MeasureKind::UniformBox: {
            const double lo = domain_.lo[0], hi = domain_.hi[0];
            return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
        }
        case MeasureKind::DiscreteAtoms: {
            double s = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i)
                if (atoms_[i][0] <= x) s += weights_[i];
            return s;
        }
        case MeasureKind::Gaussian:
            return normal_cdf((x - mean_param_) / stddev_param_);
        case MeasureKind::TruncatedGaussian: {
            if (x < trunc_lo_) return 0.0;
            if (x >= trunc_hi_) return 1.0;
            const double alpha = (trunc_lo_ - mean_param_) / stddev_param_;
            const double z = phi_mass(alpha, (trunc_hi_ - mean_param_) / stddev_param_);
            return phi_mass(alpha, (x - mean_param_) / stddev_param_) / z;
        }
        case MeasureKind::ProductDensity:
            return coord_cdf(0, x);
    }
    throw ConfigError("cdf: unsupported kind");
}

double MeasureSpec::quantile(double p) const {
    if (dim_ != 1) throw ConfigError("quantile: 1D measures only");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile: p must lie in (0,1)");
    switch (kind_) {
        case MeasureKind::UniformBox:
            return domain_.lo[0] + p * domain_.side(0);
        case MeasureKind::DiscreteAtoms: {
            double c = 0.0;
            for (std::size_t k = 0; k < sorted_order_.size(); ++k) {
                c += weights_[sorted_order_[k]];
                if (c >= p) return atoms_[sorted_order_[k]][0];
            }
            return atoms_[sorted_order_.back()][0];
        }
        case MeasureKind::Gaussian:
            return mean_param_ + stddev_param_ * normal_quantile(p);
        case MeasureKind::TruncatedGaussian: {
            const double alpha = (trunc_lo_ - mean_param_) / stddev_param_;
            const double beta = (trunc_hi_ - mean_param_) / stddev_param_;
            const double fa = normal_cdf(alpha);
            const double z = phi_mass(alpha, beta);
            const double x =
                mean_param_ + stddev_param_ * normal_quantile(fa + p * z);
            return std::clamp(x, trunc_lo_, trunc_hi_);
        }
        case MeasureKind::ProductDensity: {
            const auto& cum = cum_[0];
            const auto it = std::upper_bound(cum.begin(), cum.end(), p);
            const std::size_t j =
                std::min(static_cast<std::size_t>(std::distance(cum.begin(), it)),
                         cum.size() - 1) - 1;
            const double w = domain_.side(0) / static_cast<double>(tables_[0].size());
            const double edge = domain_.lo[0] + static_cast<double>(j) * w;
            return edge + (p - cum[j]) / tables_[0][j];
        }
    }
    throw ConfigError("quantile: unsupported kind");
}

double MeasureSpec::measure_of_box(const Box& box) const {
    if (box.dim() != dim_) throw ConfigError("measure_of_box: dimension mismatch");
    switch (kind_) {
        case MeasureKind::UniformBox:
        case MeasureKind::ProductDensity: {
            double m = 1.0;
            for (int c = 0; c < dim_; ++c)
                m *= coord_cdf(c, box.hi[c]) - coord_cdf(c, box.lo[c]);
            return std::max(m, 0.0);
        }
        case MeasureKind::DiscreteAtoms: {
            double s = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                auto p = atoms_[i];
                bool in = true;
                for (int c = 0; c < dim_ && in; ++c)
                    in = (p[c] > box.lo[c] && p[c] <= box.hi[c]);
                if (in) s += weights_[i];
            }
            return s;
        }
        case MeasureKind::Gaussian:
        case MeasureKind::TruncatedGaussian:
            return std::max(cdf(box.hi[0]) - cdf(box.lo[0]), 0.0);
    }
    throw ConfigError("measure_of_box: unsupported kind");
}

double MeasureSpec::coord_cdf(int coord, double x) const {
    switch (kind_) {
        case MeasureKind::UniformBox: {
            const double lo = domain_.lo[coord], hi = domain_.hi[coord];
            return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
        }
        case MeasureKind::ProductDensity: {
            const double lo = domain_.lo[coord];
            if (x <= lo) return 0.0;
            if (x >= domain_.hi[coord]) return 1.0;
            const auto& t = tables_[coord];
            const double w = domain_.side(coord) / static_cast<double>(t.size());
            auto j = static_cast<std::size_t>((x - lo) / w);
            j = std::min(j, t.size() - 1);
            const double edge = lo + static_cast<double>(j) * w;
            return std::clamp(cum_[coord][j] + t[j] * (x - edge), 0.0, 1.0);
        }
        default:
            if (dim_ == 1 && coord == 0) return cdf(x);
            throw ConfigError("coord_cdf: not a product kind");
    }
}

double MeasureSpec::coord_conditional_mean(int coord, double a, double b) const {
    switch (kind_) {
        case MeasureKind::UniformBox: {
            const double lo = std::max(a, domain_.lo[coord]);
            const double hi = std::min(b, domain_.hi[coord]);
            if (!(hi > lo)) throw EmptyConditioningError("uniform: interval misses the support");
            return 0.5 * (lo + hi);
        }
        case MeasureKind::ProductDensity: {
            const auto& t = tables_[coord];
            const double w = domain_.side(coord) / static_cast<double>(t.size());
            const double lo = std::max(a, domain_.lo[coord]);
            const double hi = std::min(b, domain_.hi[coord]);
            if (!(hi > lo))
                throw EmptyConditioningError("product-density: interval misses the support");
            double mass = 0.0, sum = 0.0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double x0 = std::max(lo, domain_.lo[coord] + static_cast<double>(j) * w);
                const double x1 = std::min(hi, domain_.lo[coord] + static_cast<double>(j + 1) * w);
                if (x1 <= x0) continue;
                mass += t[j] * (x1 - x0);
                sum += t[j] * 0.5 * (x1 * x1 - x0 * x0);
            }
            if (!(mass > 0.0))
                throw EmptyConditioningError("product-density: zero mass interval");
            return std::clamp(sum / mass, a, b);
        }
        default:
            if (dim_ == 1 && coord == 0) return conditional_mean(a, b);
            throw ConfigError("coord_conditional_mean: not a product kind");
    }
}

double MeasureSpec::coord_density(int coord, double x) const {
    switch (kind_) {
        case MeasureKind::UniformBox:
            return (x >= domain_.lo[coord] && x <= domain_.hi[coord])
                       ? 1.0 / domain_.side(coord)
                       : 0.0;
        case MeasureKind::ProductDensity: {
            if (x < domain_.lo[coord] || x > domain_.hi[coord]) return 0.0;
            const auto& t = tables_[coord];
            const double w = domain_.side(coord) / static_cast<double>(t.size());
            auto j = static_cast<std::size_t>((x - domain_.lo[coord]) / w);
            return t[std::min(j, t.size() - 1)];
        }
        default:
            throw ConfigError("coord_density: not a product-density kind");
    }
}

double MeasureSpec::support_lo() const {
    if (dim_ != 1) throw ConfigError("support_lo: 1D measures only");
    return kind_ == MeasureKind::Gaussian ? -kInf : domain_.lo[0];
}

double MeasureSpec::support_hi() const {
    if (dim_ != 1) throw ConfigError("support_hi: 1D measures only");
    return kind_ == MeasureKind::Gaussian ? kInf : domain_.hi[0];
}

bool MeasureSpec::support_covers(const MeasureSpec& other) const {
    if (dim_ != 1 || other.dim_ != 1) throw ConfigError("support_covers: 1D measures only");
    if (kind_ == MeasureKind::Gaussian) return true;
    if (kind_ == MeasureKind::DiscreteAtoms) {
        if (other.kind_ != MeasureKind::DiscreteAtoms) return false;
        for (std::size_t i = 0; i < other.atoms_.size(); ++i) {
            const double x = other.atoms_[i][0];
            bool found = false;
            for (std::size_t j = 0; j < atoms_.size() && !found; ++j)
                found = std::abs(atoms_[j][0] - x) <= 1e-12;
            if (!found) return false;
        }
        return true;
    }
    // Interval-supported kinds.
    return other.support_lo() >= support_lo() - 1e-12 &&
           other.support_hi() <= support_hi() + 1e-12;
}

RadiusSpec RadiusSpec::uniform(double r_max) {
    if (!(r_max > 0.0)) throw ConfigError("radius: r_max must be positive");
    RadiusSpec r;
    r.kind_ = RadiusKind::Uniform;
    r.r_max_ = r_max;
    return r;
}

RadiusSpec RadiusSpec::exponential(double rate) {
    if (!(rate > 0.0)) throw ConfigError("radius: rate must be positive");
    RadiusSpec r;
    r.kind_ = RadiusKind::Exponential;
    r.rate_ = rate;
    return r;
}

RadiusSpec RadiusSpec::discrete(std::vector<double> values, std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw ConfigError("radius: bad discrete table");
    RadiusSpec r;
    r.kind_ = RadiusKind::Discrete;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw ConfigError("radius: radii must be positive");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("radius: weights must sum to 1");
    r.values_ = std::move(values);
    r.cum_weights_.resize(weights.size());
    std::partial_sum(weights.begin(), weights.end(), r.cum_weights_.begin());
    r.cum_weights_.back() = 1.0;
    return r;
}

double RadiusSpec::sample(SeededStream& stream) const {
    const double u = stream.next_double();
    switch (kind_) {
        case RadiusKind::Uniform:
            return u * r_max_;
        case RadiusKind::Exponential:
            return -std::log1p(-u) / rate_;
        case RadiusKind::Discrete: {
            const auto it = std::upper_bound(cum_weights_.begin(), cum_weights_.end(), u);
            const std::size_t j = std::min(
                static_cast<std::size_t>(std::distance(cum_weights_.begin(), it)),
                cum_weights_.size() - 1);
            return values_[j];
        }
    }
    return r_max_;
}

std::string RadiusSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case RadiusKind::Uniform: os << "uniform:0:" << r_max_; break;
        case RadiusKind::Exponential: os << "exponential:" << rate_; break;
        case RadiusKind::Discrete: os << "discrete:" << values_.size(); break;
    }
    return os.str();
}

}  // namespace sigfield
