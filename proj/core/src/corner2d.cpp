#include "sigfield/corner2d.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sigfield/errors.hpp"
#include "sigfield/numerics.hpp"

namespace sigfield {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
        return static_cast<std::size_t>(k.first ^ (k.second * 0x9E3779B97F4A7C15ULL));
    }
};

// Sorted unique split values strictly inside (lo, hi).
std::vector<double> interior_splits(const std::vector<double>& values, double lo, double hi) {
    std::vector<double> s;
    s.reserve(values.size());
    for (double v : values)
        if (v > lo && v < hi) s.push_back(v);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Max pairwise distance among a 2D point cloud, via convex hull when large.
double cloud_diameter(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() > 80) {
        // Andrew monotone chain.
        const auto cross = [](const std::pair<double, double>& o,
                              const std::pair<double, double>& a,
                              const std::pair<double, double>& b) {
            return (a.first - o.first) * (b.second - o.second) -
                   (a.second - o.second) * (b.first - o.first);
        };
        std::vector<std::pair<double, double>> hull(2 * pts.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
            hull[k++] = pts[i];
        }
        const std::size_t lower = k + 1;
        for (std::size_t i = pts.size() - 1; i-- > 0;) {
            while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
            hull[k++] = pts[i];
        }
        hull.resize(k > 1 ? k - 1 : k);
        pts = std::move(hull);
    }
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double dx = pts[a].first - pts[b].first;
            const double dy = pts[a].second - pts[b].second;
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(best);
}

}  // namespace

CornerPartitionExact CornerPartitionExact::build(const PointSet& generators,
                                                 const MeasureSpec& spec) {
    if (!spec.is_product() || spec.kind() == MeasureKind::Gaussian)
        throw ConfigError("corner partition: product measure on a box required");
    const int d = spec.dim();
    if (d < 1 || d > 2) throw ConfigError("corner partition: d in {1,2} required");
    if (generators.size() > 0 && generators.dim != d)
        throw ConfigError("corner partition: generator dimension mismatch");

    CornerPartitionExact p;
    p.dim_ = d;
    p.domain_ = spec.domain();
    p.spec_ = std::make_shared<const MeasureSpec>(spec);

    std::vector<double> gx, gy;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        gx.push_back(generators[i][0]);
        if (d == 2) gy.push_back(generators[i][1]);
    }
    const auto sx = interior_splits(gx, p.domain_.lo[0], p.domain_.hi[0]);
    const auto sy = d == 2 ? interior_splits(gy, p.domain_.lo[1], p.domain_.hi[1])
                           : std::vector<double>{};

    p.ex_.push_back(p.domain_.lo[0]);
    p.ex_.insert(p.ex_.end(), sx.begin(), sx.end());
    p.ex_.push_back(p.domain_.hi[0]);
    p.ey_.push_back(d == 2 ? p.domain_.lo[1] : 0.0);
    if (d == 2) p.ey_.insert(p.ey_.end(), sy.begin(), sy.end());
    p.ey_.push_back(d == 2 ? p.domain_.hi[1] : 1.0);

    const int nc = static_cast<int>(p.ex_.size()) - 1;
    const int nr = static_cast<int>(p.ey_.size()) - 1;

    p.px_.resize(nc);
    p.cx_.resize(nc);
    for (int i = 0; i < nc; ++i) {
        p.px_[i] = spec.coord_cdf(0, p.ex_[i + 1]) - spec.coord_cdf(0, p.ex_[i]);
        p.cx_[i] = spec.coord_conditional_mean(0, p.ex_[i], p.ex_[i + 1]);
    }
    p.py_.resize(nr);
    p.cy_.resize(nr);
    for (int j = 0; j < nr; ++j) {
        if (d == 2) {
            p.py_[j] = spec.coord_cdf(1, p.ey_[j + 1]) - spec.coord_cdf(1, p.ey_[j]);
            p.cy_[j] = spec.coord_conditional_mean(1, p.ey_[j], p.ey_[j + 1]);
        } else {
            p.py_[j] = 1.0;
            p.cy_[j] = 0.5;
        }
    }
    p.py_prefix_.assign(nr + 1, 0.0);
    p.pycy_prefix_.assign(nr + 1, 0.0);
    for (int j = 0; j < nr; ++j) {
        p.py_prefix_[j + 1] = p.py_prefix_[j] + p.py_[j];
        p.pycy_prefix_[j + 1] = p.pycy_prefix_[j] + p.py_[j] * p.cy_[j];
    }

    // Column rank a_k: number of columns contained in { x <= p_x }; likewise
    // row rank b_k.  A generator on the domain edge covers every interval.
    const std::size_t n = generators.size();
    std::vector<int> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pxv = generators[k][0];
        a[k] = static_cast<int>(std::upper_bound(sx.begin(), sx.end(), pxv) - sx.begin());
        if (pxv >= p.domain_.hi[0]) a[k] = nc;
        if (d == 2) {
            const double pyv = generators[k][1];
            b[k] = static_cast<int>(std::upper_bound(sy.begin(), sy.end(), pyv) - sy.begin());
            if (pyv >= p.domain_.hi[1]) b[k] = nr;
        } else {
            b[k] = 1;
        }
    }

    // Atom identity of micro-cell (i,j) is the dominance set
    // { k : a_k > i and b_k > j }, tracked by a pair of additive hashes as
    // rows are swept top-down.
    std::vector<std::size_t> by_row_entry(n);
    for (std::size_t k = 0; k < n; ++k) by_row_entry[k] = k;
    std::sort(by_row_entry.begin(), by_row_entry.end(),
              [&](std::size_t u, std::size_t v) { return b[u] > b[v]; });

    std::vector<std::uint64_t> h1(nc, 0), h2(nc, 0);
    p.atom_of_micro_.assign(static_cast<std::size_t>(nc) * nr, -1);
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::int32_t, KeyHash> registry;
    std::size_t next_entry = 0;
    for (int j = nr - 1; j >= 0; --j) {
        while (next_entry < n && b[by_row_entry[next_entry]] == j + 1) {
            const std::size_t k = by_row_entry[next_entry++];
            const std::uint64_t f1 = mix64(0x5EEDF00DULL ^ k);
            const std::uint64_t f2 = mix64(0xC0FFEEULL + 0x9E37ULL * k);
            for (int i = 0; i < a[k]; ++i) {
                h1[i] += f1;
                h2[i] += f2;
            }
        }
        for (int i = 0; i < nc; ++i) {
            auto [it, inserted] =
                registry.try_emplace({h1[i], h2[i]},
                                     static_cast<std::int32_t>(p.cells_.size()));
            if (inserted) p.cells_.emplace_back();
            const std::int32_t id = it->second;
            p.atom_of_micro_[static_cast<std::size_t>(j) * nc + i] = id;
            p.cells_[static_cast<std::size_t>(id)].mass += p.px_[i] * p.py_[j];
        }
    }

    // Column runs (contiguous by construction: atoms are staircase slabs).
    for (int i = 0; i < nc; ++i) {
        int j = 0;
        while (j < nr) {
            const std::int32_t id = p.atom_of_micro_[static_cast<std::size_t>(j) * nc + i];
            int j2 = j;
            while (j2 + 1 < nr &&
                   p.atom_of_micro_[static_cast<std::size_t>(j2 + 1) * nc + i] == id)
                ++j2;
            p.cells_[static_cast<std::size_t>(id)].runs.push_back({i, j, j2});
            j = j2 + 1;
        }
    }

    for (auto& cell : p.cells_) {
        if (d == 1) {
            double diam = 0.0;
            for (const auto& r : cell.runs)
                diam = std::max(diam, p.ex_[r.col + 1] - p.ex_[r.col]);
            cell.diameter = diam;  // single run in 1D
            continue;
        }
        std::vector<std::pair<double, double>> corners;
        corners.reserve(cell.runs.size() * 4);
        for (const auto& r : cell.runs) {
            corners.emplace_back(p.ex_[r.col], p.ey_[r.row_lo]);
            corners.emplace_back(p.ex_[r.col + 1], p.ey_[r.row_lo]);
            corners.emplace_back(p.ex_[r.col], p.ey_[r.row_hi + 1]);
            corners.emplace_back(p.ex_[r.col + 1], p.ey_[r.row_hi + 1]);
        }
        cell.diameter = cloud_diameter(std::move(corners));
    }

    // Drop zero-mass atoms (they can appear when generator coordinates
    // coincide with domain edges).
    std::vector<std::int32_t> remap(p.cells_.size(), -1);
    std::vector<CellGeom> kept;
    kept.reserve(p.cells_.size());
    for (std::size_t c = 0; c < p.cells_.size(); ++c) {
        if (p.cells_[c].mass > 0.0) {
            remap[c] = static_cast<std::int32_t>(kept.size());
            kept.push_back(std::move(p.cells_[c]));
        }
    }
    if (kept.size() != p.cells_.size()) {
        for (auto& id : p.atom_of_micro_) id = remap[static_cast<std::size_t>(id)];
        p.cells_ = std::move(kept);
    }
    return p;
}

std::size_t CornerPartitionExact::cell_of(std::span<const double> x) const {
    const auto& sxv = ex_;
    const int i = static_cast<int>(
        std::lower_bound(sxv.begin() + 1, sxv.end() - 1, x[0]) - (sxv.begin() + 1));
    int j = 0;
    if (dim_ == 2)
        j = static_cast<int>(std::lower_bound(ey_.begin() + 1, ey_.end() - 1, x[1]) -
                             (ey_.begin() + 1));
    const std::int32_t id = atom_of_micro_[static_cast<std::size_t>(j) * ncols() + i];
    if (id < 0) throw ConfigError("corner partition: point in a zero-mass atom");
    return static_cast<std::size_t>(id);
}

double CornerPartitionExact::diameter_bound() const {
    double s = 0.0;
    for (const auto& c : cells_) s += c.mass * c.diameter;
    return s;
}

double CornerPartitionExact::cell_box_mass(std::size_t cell, const Box& target) const {
    const auto& spec = *spec_;
    double total = 0.0;
    for (const auto& r : cells_[cell].runs) {
        const double x0 = std::max(ex_[r.col], target.lo[0]);
        const double x1 = std::min(ex_[r.col + 1], target.hi[0]);
        if (x1 <= x0) continue;
        double dx = spec.coord_cdf(0, x1) - spec.coord_cdf(0, x0);
        if (dim_ == 1) {
            total += dx;
            continue;
        }
        const double y0 = std::max(ey_[r.row_lo], target.lo[1]);
        const double y1 = std::min(ey_[r.row_hi + 1], target.hi[1]);
        if (y1 <= y0) continue;
        total += dx * (spec.coord_cdf(1, y1) - spec.coord_cdf(1, y0));
    }
    return total;
}

double CornerPartitionExact::cell_linear_mean(std::span<const double> w,
                                              std::size_t cell) const {
    const CellGeom& c = cells_[cell];
    double acc = 0.0;
    for (const auto& r : c.runs) {
        const double my = py_prefix_[r.row_hi + 1] - py_prefix_[r.row_lo];
        const double m = px_[r.col] * my;
        if (m <= 0.0) continue;
        double v = w[0] * cx_[r.col];
        if (dim_ == 2) {
            const double ybar =
                (pycy_prefix_[r.row_hi + 1] - pycy_prefix_[r.row_lo]) / my;
            v += w[1] * ybar;
        }
        acc += m * v;
    }
    return acc / c.mass;
}

double CornerPartitionExact::cell_function_mean(
    const std::function<double(std::span<const double>)>& f, std::size_t cell,
    int gl_order) const {
    const auto& gl = GaussLegendre::order(gl_order);
    const CellGeom& c = cells_[cell];
    double acc = 0.0;
    double pt[2] = {0.0, 0.0};
    for (const auto& r : c.runs) {
        const double x0 = ex_[r.col], x1 = ex_[r.col + 1];
        const double mx = px_[r.col];
        const double y0 = ey_[r.row_lo], y1 = ey_[r.row_hi + 1];
        const double my = py_prefix_[r.row_hi + 1] - py_prefix_[r.row_lo];
        if (dim_ == 1) {
            for (int u = 0; u < gl_order; ++u) {
                pt[0] = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gl.nodes[u];
                acc += 0.5 * gl.weights[u] * mx * f(std::span<const double>(pt, 1));
            }
            continue;
        }
        for (int u = 0; u < gl_order; ++u) {
            pt[0] = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gl.nodes[u];
            for (int v = 0; v < gl_order; ++v) {
                pt[1] = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gl.nodes[v];
                acc += 0.25 * gl.weights[u] * gl.weights[v] * mx * my *
                       f(std::span<const double>(pt, 2));
            }
        }
    }
    return acc / c.mass;
}

}  // namespace sigfield
