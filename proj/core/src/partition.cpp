#include "sigfield/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigfield/errors.hpp"

namespace sigfield {

GeneratorSet GeneratorSet::corner_box(std::vector<double> p) {
    GeneratorSet g;
    g.kind = Kind::CornerBox;
    g.point = std::move(p);
    return g;
}

GeneratorSet GeneratorSet::ball(std::vector<double> center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("ball generator: radius must be positive");
    GeneratorSet g;
    g.kind = Kind::Ball;
    g.point = std::move(center);
    g.radius = radius;
    return g;
}

GeneratorSet GeneratorSet::halfspace_threshold(int coord, double threshold) {
    if (coord < 0) throw ConfigError("halfspace generator: bad coordinate");
    GeneratorSet g;
    g.kind = Kind::HalfspaceThreshold;
    g.coord = coord;
    g.threshold = threshold;
    return g;
}

bool GeneratorSet::contains(std::span<const double> x) const {
    switch (kind) {
        case Kind::CornerBox:
            for (std::size_t i = 0; i < point.size(); ++i)
                if (x[i] > point[i]) return false;
            return true;
        case Kind::Ball: {
            double s = 0.0;
            for (std::size_t i = 0; i < point.size(); ++i) {
                const double d = x[i] - point[i];
                s += d * d;
            }
            return s < radius * radius;
        }
        case Kind::HalfspaceThreshold:
            return x[coord] <= threshold;
    }
    return false;
}

std::size_t SignaturePartition::SigHash::operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : v) {
        h ^= w;
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
}

namespace {

// Interval bounds of a cell under one-sided generators in 1D; exact cell
// geometry for the "provably a box" case.
std::pair<double, double> interval_bounds(const Box& domain,
                                          const std::vector<GeneratorSet>& gens,
                                          const std::vector<std::uint64_t>& signature) {
    double lo = domain.lo[0], hi = domain.hi[0];
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const double t =
            gens[k].kind == GeneratorSet::Kind::CornerBox ? gens[k].point[0] : gens[k].threshold;
        const bool inside = (signature[k >> 6] >> (k & 63)) & 1;
        if (inside)
            hi = std::min(hi, t);
        else
            lo = std::max(lo, t);
    }
    return {lo, hi};
}

}  // namespace

SignaturePartition SignaturePartition::build(std::vector<GeneratorSet> generators,
                                             const MeasureSpec& spec,
                                             std::size_t reference_size, SeededStream stream) {
    if (reference_size == 0)
        throw ConfigError("signature partition: reference sample must be nonempty");
    SignaturePartition p;
    p.generators_ = std::move(generators);
    p.domain_ = spec.domain();
    p.points_ = std::make_shared<const PointSet>(spec.sample(reference_size, stream));

    const std::size_t n = p.generators_.size();
    const std::size_t words = (n + 63) / 64;
    const PointSet& pts = *p.points_;
    p.point_cell_.resize(pts.size());

    std::vector<std::uint64_t> sig(words);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::fill(sig.begin(), sig.end(), 0);
        const auto x = pts[i];
        for (std::size_t k = 0; k < n; ++k)
            if (p.generators_[k].contains(x)) sig[k >> 6] |= std::uint64_t{1} << (k & 63);
        auto [it, inserted] = p.cell_index_.try_emplace(sig, p.cells_.size());
        if (inserted) {
            Cell c;
            c.signature = sig;
            p.cells_.push_back(std::move(c));
        }
        const std::size_t id = it->second;
        p.point_cell_[i] = static_cast<std::uint32_t>(id);
        p.cells_[id].count++;
        if (p.cells_[id].retained.size() < kRetainedPerCell)
            p.cells_[id].retained.push_back(static_cast<std::uint32_t>(i));
    }
    for (auto& c : p.cells_) p.recompute_cell_geometry(c);
    return p;
}

SignaturePartition SignaturePartition::refined(const GeneratorSet& g) const& {
    SignaturePartition copy = *this;
    return std::move(copy).refined(g);
}

SignaturePartition SignaturePartition::refined(const GeneratorSet& g) && {
    SignaturePartition p = std::move(*this);
    const PointSet& pts = *p.points_;
    const std::size_t n_old = p.generators_.size();
    const std::size_t words_new = (n_old + 1 + 63) / 64;

    std::vector<std::uint8_t> bit(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) bit[i] = g.contains(pts[i]) ? 1 : 0;

    // Map (old cell, bit) -> new cell id, in first-encounter point order so
    // the result is independent of everything but the inputs.
    std::vector<std::int32_t> child[2];
    child[0].assign(p.cells_.size(), -1);
    child[1].assign(p.cells_.size(), -1);
    std::vector<Cell> new_cells;
    new_cells.reserve(p.cells_.size() + 8);
    std::vector<std::uint32_t> new_point_cell(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::uint32_t oc = p.point_cell_[i];
        std::int32_t& slot = child[bit[i]][oc];
        if (slot < 0) {
            slot = static_cast<std::int32_t>(new_cells.size());
            Cell c;
            c.signature = p.cells_[oc].signature;
            c.signature.resize(words_new, 0);
            if (bit[i]) c.signature[n_old >> 6] |= std::uint64_t{1} << (n_old & 63);
            new_cells.push_back(std::move(c));
        }
        Cell& c = new_cells[static_cast<std::size_t>(slot)];
        new_point_cell[i] = static_cast<std::uint32_t>(slot);
        c.count++;
        if (c.retained.size() < kRetainedPerCell)
            c.retained.push_back(static_cast<std::uint32_t>(i));
    }

    // Unsplit cells keep their geometry; both halves of a split cell are
    // measured afresh.
    std::vector<std::uint8_t> split(p.cells_.size());
    for (std::size_t oc = 0; oc < p.cells_.size(); ++oc)
        split[oc] = (child[0][oc] >= 0 && child[1][oc] >= 0) ? 1 : 0;

    p.generators_.push_back(g);
    const bool exact_intervals = p.domain_.dim() == 1 && g.one_sided();
    for (std::size_t oc = 0; oc < p.cells_.size(); ++oc) {
        for (int b = 0; b < 2; ++b) {
            const std::int32_t nc = child[b][oc];
            if (nc < 0) continue;
            Cell& c = new_cells[static_cast<std::size_t>(nc)];
            if (!split[oc] && !exact_intervals)
                c.diameter = p.cells_[oc].diameter;
            else
                p.recompute_cell_geometry(c);
        }
    }

    p.cells_ = std::move(new_cells);
    p.point_cell_ = std::move(new_point_cell);
    p.cell_index_.clear();
    for (std::size_t id = 0; id < p.cells_.size(); ++id)
        p.cell_index_.emplace(p.cells_[id].signature, id);
    return p;
}

void SignaturePartition::recompute_cell_geometry(Cell& cell) const {
    bool all_one_sided = true;
    for (const auto& g : generators_)
        if (!g.one_sided()) all_one_sided = false;
    if (domain_.dim() == 1 && all_one_sided) {
        const auto [lo, hi] = interval_bounds(domain_, generators_, cell.signature);
        cell.diameter = std::max(hi - lo, 0.0);
        return;
    }
    const PointSet& pts = *points_;
    double best = 0.0;
    for (std::size_t a = 0; a < cell.retained.size(); ++a)
        for (std::size_t b = a + 1; b < cell.retained.size(); ++b)
            best = std::max(best, sq_distance(pts[cell.retained[a]], pts[cell.retained[b]]));
    cell.diameter = std::sqrt(best);
}

CellStats SignaturePartition::cell_stats(std::size_t cell) const {
    const Cell& c = cells_.at(cell);
    CellStats s;
    s.measure_estimate = cell_measure(cell);
    s.diameter_estimate = c.diameter;
    s.sample_count = c.count;
    const auto rep = (*points_)[c.retained.front()];
    s.representative.assign(rep.begin(), rep.end());
    return s;
}

double SignaturePartition::cell_measure(std::size_t cell) const {
    return static_cast<double>(cells_.at(cell).count) /
           static_cast<double>(points_->size());
}

double SignaturePartition::cell_diameter(std::size_t cell) const {
    return cells_.at(cell).diameter;
}

std::size_t SignaturePartition::cell_size(std::size_t cell) const {
    return cells_.at(cell).count;
}

bool SignaturePartition::signature_bit(std::size_t cell, std::size_t generator) const {
    const auto& sig = cells_.at(cell).signature;
    return (sig[generator >> 6] >> (generator & 63)) & 1;
}

std::vector<std::uint64_t> SignaturePartition::signature_of(std::span<const double> x) const {
    const std::size_t n = generators_.size();
    std::vector<std::uint64_t> sig((n + 63) / 64, 0);
    for (std::size_t k = 0; k < n; ++k)
        if (generators_[k].contains(x)) sig[k >> 6] |= std::uint64_t{1} << (k & 63);
    return sig;
}

std::optional<std::size_t> SignaturePartition::cell_of(std::span<const double> x) const {
    const auto it = cell_index_.find(signature_of(x));
    if (it == cell_index_.end()) return std::nullopt;
    return it->second;
}

double SignaturePartition::diameter_bound() const {
    double s = 0.0;
    const double m = static_cast<double>(points_->size());
    for (const auto& c : cells_) s += static_cast<double>(c.count) / m * c.diameter;
    return s;
}

GridPartition GridPartition::from_points(const PointSet& points, Box domain) {
    const int d = domain.dim();
    if (points.size() > 0 && points.dim != d)
        throw ConfigError("symmetric grid: point/domain dimension mismatch");
    std::vector<std::vector<double>> splits(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points[i];
        for (int c = 0; c < d; ++c)
            if (p[c] > domain.lo[c] && p[c] < domain.hi[c]) splits[c].push_back(p[c]);
    }
    for (auto& s : splits) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return from_splits(std::move(domain), std::move(splits));
}

GridPartition GridPartition::from_splits(Box domain, std::vector<std::vector<double>> splits) {
    if (static_cast<int>(splits.size()) != domain.dim())
        throw ConfigError("grid: one split list per coordinate required");
    GridPartition g;
    g.domain_ = std::move(domain);
    g.splits_ = std::move(splits);
    for (int c = 0; c < g.dim(); ++c)
        if (!std::is_sorted(g.splits_[c].begin(), g.splits_[c].end()))
            throw ConfigError("grid: splits must be sorted");
    return g;
}

double GridPartition::cell_count() const {
    double n = 1.0;
    for (const auto& s : splits_) n *= static_cast<double>(s.size() + 1);
    return n;
}

int GridPartition::interval_of(int coord, double x) const {
    const auto& s = splits_[coord];
    return static_cast<int>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

std::vector<int> GridPartition::cell_of(std::span<const double> x) const {
    std::vector<int> idx(dim());
    for (int c = 0; c < dim(); ++c) idx[c] = interval_of(c, x[c]);
    return idx;
}

Box GridPartition::cell_box(const std::vector<int>& cell) const {
    std::vector<double> lo(dim()), hi(dim());
    for (int c = 0; c < dim(); ++c) {
        const auto& s = splits_[c];
        const int i = cell[c];
        lo[c] = i == 0 ? domain_.lo[c] : s[i - 1];
        hi[c] = i == static_cast<int>(s.size()) ? domain_.hi[c] : s[i];
    }
    return Box(std::move(lo), std::move(hi));
}

std::vector<double> GridPartition::upper_corner(const std::vector<int>& cell) const {
    std::vector<double> u(dim());
    for (int c = 0; c < dim(); ++c) {
        const auto& s = splits_[c];
        const int i = cell[c];
        u[c] = i < static_cast<int>(s.size()) ? s[i] : domain_.hi[c];
    }
    return u;
}

double GridPartition::cell_mass(const MeasureSpec& spec, const std::vector<int>& cell) const {
    return spec.measure_of_box(cell_box(cell));
}

double GridPartition::diameter_bound(const MeasureSpec& spec, double max_cells) const {
    if (cell_count() > max_cells)
        throw ConfigError("grid diameter_bound: too many cells to enumerate");
    const int d = dim();
    // Per-coordinate interval masses and squared widths.
    std::vector<std::vector<double>> mass(d), w2(d);
    for (int c = 0; c < d; ++c) {
        const auto& s = splits_[c];
        mass[c].resize(s.size() + 1);
        w2[c].resize(s.size() + 1);
        double prev = domain_.lo[c];
        for (std::size_t i = 0; i <= s.size(); ++i) {
            const double next = i < s.size() ? s[i] : domain_.hi[c];
            mass[c][i] = spec.coord_cdf(c, next) - spec.coord_cdf(c, prev);
            w2[c][i] = (next - prev) * (next - prev);
            prev = next;
        }
    }
    std::vector<std::size_t> idx(d, 0);
    double total = 0.0;
    while (true) {
        double m = 1.0, s2 = 0.0;
        for (int c = 0; c < d; ++c) {
            m *= mass[c][idx[c]];
            s2 += w2[c][idx[c]];
        }
        total += m * std::sqrt(s2);
        int c = 0;
        for (; c < d; ++c) {
            if (++idx[c] <= splits_[c].size()) break;
            idx[c] = 0;
        }
        if (c == d) break;
    }
    return total;
}

std::pair<double, double> GridPartition::estimate_diameter_bound(const MeasureSpec& spec,
                                                                 std::size_t n,
                                                                 SeededStream stream) const {
    const PointSet pts = spec.sample(n, stream);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto x = pts[i];
        double s2 = 0.0;
        for (int c = 0; c < dim(); ++c) {
            const auto& s = splits_[c];
            const int j = interval_of(c, x[c]);
            const double lo = j == 0 ? domain_.lo[c] : s[j - 1];
            const double hi = j == static_cast<int>(s.size()) ? domain_.hi[c] : s[j];
            s2 += (hi - lo) * (hi - lo);
        }
        const double dm = std::sqrt(s2);
        sum += dm;
        sum2 += dm * dm;
    }
    const double m = static_cast<double>(n);
    const double mean = sum / m;
    const double var = std::max(0.0, sum2 / m - mean * mean);
    return {mean, std::sqrt(var / m)};
}

SignaturePartition build_corner_partition(const PointSet& points, const MeasureSpec& spec,
                                          std::size_t reference_size, SeededStream stream) {
    std::vector<GeneratorSet> gens;
    gens.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points[i];
        gens.push_back(GeneratorSet::corner_box(std::vector<double>(p.begin(), p.end())));
    }
    return SignaturePartition::build(std::move(gens), spec, reference_size, stream);
}

SignaturePartition build_ball_partition(const PointSet& centers, const std::vector<double>& radii,
                                        const MeasureSpec& spec, std::size_t reference_size,
                                        SeededStream stream) {
    if (centers.size() != radii.size())
        throw ConfigError("ball partition: centers/radii length mismatch");
    std::vector<GeneratorSet> gens;
    gens.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto p = centers[i];
        gens.push_back(GeneratorSet::ball(std::vector<double>(p.begin(), p.end()), radii[i]));
    }
    return SignaturePartition::build(std::move(gens), spec, reference_size, stream);
}

GridPartition build_symmetric_grid(const PointSet& points, Box domain) {
    return GridPartition::from_points(points, std::move(domain));
}

}  // namespace sigfield
