#include "sigfield/liploss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigfield/errors.hpp"
#include "sigfield/parallel.hpp"

namespace sigfield {

namespace {
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
}

std::string scheme_name(Scheme s) {
    return s == Scheme::SymmetricGrid ? "symmetric" : "asymmetric";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "symmetric" || name == "symmetric-grid") return Scheme::SymmetricGrid;
    if (name == "asymmetric" || name == "asymmetric-corner") return Scheme::AsymmetricCorner;
    throw ConfigError("unknown scheme: " + name);
}

LipschitzWitness LipschitzWitness::coordinate(int coord) {
    LipschitzWitness w;
    w.kind_ = Kind::Coordinate;
    w.coord_ = coord;
    w.lipschitz_ = 1.0;
    w.name_ = "coord-" + std::to_string(coord);
    return w;
}

LipschitzWitness LipschitzWitness::random_linear(std::vector<double> unit_direction) {
    double norm = 0.0;
    for (double v : unit_direction) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw ConfigError("random_linear: zero direction");
    for (double& v : unit_direction) v /= norm;
    LipschitzWitness w;
    w.kind_ = Kind::RandomLinear;
    w.direction_ = std::move(unit_direction);
    w.lipschitz_ = 1.0;
    w.name_ = "linear";
    return w;
}

LipschitzWitness LipschitzWitness::distance_to(std::vector<double> point) {
    LipschitzWitness w;
    w.kind_ = Kind::DistanceToPoint;
    w.point_ = std::move(point);
    w.lipschitz_ = 1.0;
    w.name_ = "distance";
    return w;
}

LipschitzWitness LipschitzWitness::table_1d(std::vector<double> values) {
    if (values.size() < 2) throw ConfigError("table witness: need >= 2 values");
    LipschitzWitness w;
    w.kind_ = Kind::Table1D;
    const double h = 1.0 / static_cast<double>(values.size() - 1);
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        lip = std::max(lip, std::abs(values[i + 1] - values[i]) / h);
    w.table_ = std::move(values);
    w.lipschitz_ = lip;
    w.name_ = "table";
    return w;
}

LipschitzWitness LipschitzWitness::callable(std::function<double(std::span<const double>)> fn,
                                            double lipschitz, std::string name) {
    LipschitzWitness w;
    w.kind_ = Kind::Callable;
    w.fn_ = std::move(fn);
    w.lipschitz_ = lipschitz;
    w.name_ = std::move(name);
    return w;
}

LipschitzWitness LipschitzWitness::constant(double value) {
    return callable([value](std::span<const double>) { return value; }, 0.0, "constant");
}

double LipschitzWitness::evaluate(std::span<const double> x) const {
    switch (kind_) {
        case Kind::Coordinate:
            return x[coord_];
        case Kind::RandomLinear: {
            double s = 0.0;
            for (std::size_t i = 0; i < direction_.size(); ++i) s += direction_[i] * x[i];
            return s;
        }
        case Kind::DistanceToPoint: {
            double s = 0.0;
            for (std::size_t i = 0; i < point_.size(); ++i) {
                const double d = x[i] - point_[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case Kind::Table1D: {
            const double t = std::clamp(x[0], 0.0, 1.0) *
                             static_cast<double>(table_.size() - 1);
            const auto i = std::min(static_cast<std::size_t>(t), table_.size() - 2);
            const double frac = t - static_cast<double>(i);
            return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
        }
        case Kind::Callable:
            return fn_(x);
    }
    return 0.0;
}

std::vector<double> LipschitzWitness::direction(int dim) const {
    if (kind_ == Kind::RandomLinear) return direction_;
    std::vector<double> dir(dim, 0.0);
    dir[coord_] = 1.0;
    return dir;
}

std::vector<LipschitzWitness> default_witness_family(int d, SeededStream stream) {
    std::vector<LipschitzWitness> out;
    for (int c = 0; c < d; ++c) out.push_back(LipschitzWitness::coordinate(c));
    for (int k = 0; k < 8; ++k) {
        std::vector<double> dir(d);
        for (int c = 0; c < d; ++c) dir[c] = stream.next_normal();
        out.push_back(LipschitzWitness::random_linear(std::move(dir)));
    }
    std::vector<double> p(d);
    for (int c = 0; c < d; ++c) p[c] = stream.next_double();
    out.push_back(LipschitzWitness::distance_to(std::move(p)));
    return out;
}

bool validate_lipschitz(const LipschitzWitness& f, const Box& domain, std::size_t pairs,
                        SeededStream stream, double slack) {
    const int d = domain.dim();
    std::vector<double> x(d), y(d);
    for (std::size_t i = 0; i < pairs; ++i) {
        for (int c = 0; c < d; ++c) {
            x[c] = domain.lo[c] + stream.next_double() * domain.side(c);
            y[c] = domain.lo[c] + stream.next_double() * domain.side(c);
        }
        const double gap = std::abs(f.evaluate(x) - f.evaluate(y));
        if (gap > f.lipschitz() * distance(x, y) + slack) return false;
    }
    return true;
}

namespace {

std::size_t grid_flat_index(const GridPartition& grid, const std::vector<int>& cell) {
    std::size_t flat = 0;
    for (int c = 0; c < grid.dim(); ++c)
        flat = flat * (grid.splits(c).size() + 1) + static_cast<std::size_t>(cell[c]);
    return flat;
}

// E[f | box] under a product measure via tensor Gauss-Legendre, with the
// per-axis density folded into the weights.
double box_function_mean(const MeasureSpec& spec, const Box& box,
                         const LipschitzWitness& f, int order) {
    const auto& gl = GaussLegendre::order(order);
    const int d = box.dim();
    std::vector<std::vector<double>> nodes(d), weights(d);
    for (int c = 0; c < d; ++c) {
        const double mass = spec.coord_cdf(c, box.hi[c]) - spec.coord_cdf(c, box.lo[c]);
        nodes[c].resize(order);
        weights[c].resize(order);
        for (int u = 0; u < order; ++u) {
            const double x = 0.5 * (box.lo[c] + box.hi[c]) + 0.5 * box.side(c) * gl.nodes[u];
            nodes[c][u] = x;
            weights[c][u] =
                0.5 * gl.weights[u] * box.side(c) * spec.coord_density(c, x) / mass;
        }
    }
    std::vector<int> idx(d, 0);
    std::vector<double> pt(d);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (int c = 0; c < d; ++c) {
            w *= weights[c][idx[c]];
            pt[c] = nodes[c][idx[c]];
        }
        acc += w * f.evaluate(pt);
        int c = 0;
        for (; c < d; ++c) {
            if (++idx[c] < order) break;
            idx[c] = 0;
        }
        if (c == d) break;
    }
    return acc;
}

// Lazily evaluates E[f | cell(x)] for a grid partition.
class GridProjector {
public:
    GridProjector(const GridPartition& grid, const MeasureSpec& spec, const LipschitzWitness& f)
        : grid_(grid), spec_(spec), f_(f), linear_(f.is_linear()) {
        if (linear_) {
            dir_ = f.direction(grid.dim());
            coord_means_.resize(grid.dim());
            for (int c = 0; c < grid.dim(); ++c) {
                if (dir_[c] == 0.0) continue;
                const auto& s = grid.splits(c);
                auto& cm = coord_means_[c];
                cm.resize(s.size() + 1);
                double prev = grid.domain().lo[c];
                for (std::size_t i = 0; i <= s.size(); ++i) {
                    const double next = i < s.size() ? s[i] : grid.domain().hi[c];
                    cm[i] = spec.coord_conditional_mean(c, prev, next);
                    prev = next;
                }
            }
        }
    }

    double value_at_intervals(const std::vector<int>& cell) {
        if (linear_) {
            double v = 0.0;
            for (int c = 0; c < grid_.dim(); ++c)
                if (dir_[c] != 0.0) v += dir_[c] * coord_means_[c][cell[c]];
            return v;
        }
        const std::size_t flat = grid_flat_index(grid_, cell);
        auto [it, inserted] = cache_.try_emplace(flat, kUnset);
        if (inserted) it->second = box_function_mean(spec_, grid_.cell_box(cell), f_, 8);
        return it->second;
    }

private:
    const GridPartition& grid_;
    const MeasureSpec& spec_;
    const LipschitzWitness& f_;
    bool linear_;
    std::vector<double> dir_;
    std::vector<std::vector<double>> coord_means_;
    std::unordered_map<std::size_t, double> cache_;
};

// Lazily evaluates E[f | cell] for an exact corner partition.
class CornerProjector {
public:
    CornerProjector(const CornerPartitionExact& part, const LipschitzWitness& f)
        : part_(part), f_(f), values_(part.cell_count(), kUnset) {
        if (f.is_linear()) dir_ = f.direction(part.dim());
    }

    double value_at_cell(std::size_t cell) {
        double& v = values_[cell];
        if (std::isnan(v)) {
            if (!dir_.empty())
                v = part_.cell_linear_mean(dir_, cell);
            else
                v = part_.cell_function_mean(
                    [this](std::span<const double> x) { return f_.evaluate(x); }, cell, 8);
        }
        return v;
    }

private:
    const CornerPartitionExact& part_;
    const LipschitzWitness& f_;
    std::vector<double> dir_;
    std::vector<double> values_;
};

std::vector<double> signature_cell_means(const SignaturePartition& partition,
                                         const LipschitzWitness& f) {
    const PointSet& pts = partition.reference_points();
    std::vector<double> sums(partition.cell_count(), 0.0);
    std::vector<std::size_t> counts(partition.cell_count(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = partition.cell_of_point(i);
        sums[c] += f.evaluate(pts[i]);
        counts[c]++;
    }
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] /= static_cast<double>(counts[c]);
    return sums;
}

}  // namespace

double PiecewiseConstant::evaluate(std::span<const double> x) const {
    switch (rep_) {
        case Rep::Grid:
            return values_[grid_flat_index(*grid_, grid_->cell_of(x))];
        case Rep::Corner:
            return values_[corner_->cell_of(x)];
        case Rep::Signature: {
            const auto c = signature_->cell_of(x);
            if (c) return values_[*c];
            // Zero-mass signature: fall back to the nearest cell representative.
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t k = 0; k < signature_->cell_count(); ++k) {
                const auto stats = signature_->cell_stats(k);
                const double d = sq_distance(
                    x, std::span<const double>(stats.representative.data(),
                                               stats.representative.size()));
                if (d < best) {
                    best = d;
                    arg = k;
                }
            }
            return values_[arg];
        }
    }
    return 0.0;
}

PiecewiseConstant project(const GridPartition& partition, const LipschitzWitness& f,
                          const MeasureSpec& spec, double max_cells) {
    if (partition.cell_count() > max_cells)
        throw ConfigError("project: too many grid cells to materialize");
    PiecewiseConstant out;
    out.rep_ = PiecewiseConstant::Rep::Grid;
    out.grid_ = &partition;

    GridProjector projector(partition, spec, f);
    const int d = partition.dim();
    const auto n_cells = static_cast<std::size_t>(partition.cell_count());
    out.values_.assign(n_cells, kUnset);
    std::vector<std::size_t> empty_cells;
    std::vector<int> idx(d, 0);
    std::size_t flat = 0;
    while (true) {
        if (spec.measure_of_box(partition.cell_box(idx)) > 0.0)
            out.values_[flat] = projector.value_at_intervals(idx);
        else
            empty_cells.push_back(flat);
        ++flat;
        int c = d - 1;
        for (; c >= 0; --c) {
            if (++idx[c] <= static_cast<int>(partition.splits(c).size())) break;
            idx[c] = 0;
        }
        if (c < 0) break;
    }
    if (!empty_cells.empty()) {
        // Nearest-nonempty-cell rule, by cell center; deterministic and
        // irrelevant in L1.
        std::vector<std::vector<int>> nonempty;
        std::vector<int> it(d, 0);
        for (std::size_t fi = 0; fi < n_cells; ++fi) {
            if (!std::isnan(out.values_[fi])) nonempty.push_back(it);
            int c = d - 1;
            for (; c >= 0; --c) {
                if (++it[c] <= static_cast<int>(partition.splits(c).size())) break;
                it[c] = 0;
            }
        }
        for (std::size_t e : empty_cells) {
            std::vector<int> cell(d);
            std::size_t rem = e;
            for (int c = d - 1; c >= 0; --c) {
                const std::size_t width = partition.splits(c).size() + 1;
                cell[c] = static_cast<int>(rem % width);
                rem /= width;
            }
            const Box eb = partition.cell_box(cell);
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (const auto& cand : nonempty) {
                const Box cb = partition.cell_box(cand);
                double dist = 0.0;
                for (int c = 0; c < d; ++c) {
                    const double dc = 0.5 * (cb.lo[c] + cb.hi[c]) - 0.5 * (eb.lo[c] + eb.hi[c]);
                    dist += dc * dc;
                }
                if (dist < best) {
                    best = dist;
                    arg = grid_flat_index(partition, cand);
                }
            }
            out.values_[e] = out.values_[arg];
        }
    }
    return out;
}

PiecewiseConstant project(const SignaturePartition& partition, const LipschitzWitness& f) {
    PiecewiseConstant out;
    out.rep_ = PiecewiseConstant::Rep::Signature;
    out.signature_ = &partition;
    out.values_ = signature_cell_means(partition, f);
    return out;
}

PiecewiseConstant project(const CornerPartitionExact& partition, const LipschitzWitness& f) {
    PiecewiseConstant out;
    out.rep_ = PiecewiseConstant::Rep::Corner;
    out.corner_ = &partition;
    CornerProjector projector(partition, f);
    out.values_.resize(partition.cell_count());
    for (std::size_t c = 0; c < partition.cell_count(); ++c)
        out.values_[c] = projector.value_at_cell(c);
    return out;
}

namespace {

McEstimate mc_mean(const std::vector<double>& xs) {
    McEstimate e;
    const double m = static_cast<double>(xs.size());
    for (double x : xs) e.estimate += x;
    e.estimate /= m;
    double var = 0.0;
    for (double x : xs) var += (x - e.estimate) * (x - e.estimate);
    e.std_error = xs.size() > 1 ? std::sqrt(var / (m - 1.0) / m) : 0.0;
    return e;
}

}  // namespace

McEstimate l1_loss(const GridPartition& partition, const LipschitzWitness& f,
                   const MeasureSpec& spec, std::size_t samples, SeededStream stream) {
    if (f.kind() == LipschitzWitness::Kind::Coordinate &&
        spec.kind() == MeasureKind::UniformBox) {
        const int c = f.coord();
        const auto& s = partition.splits(c);
        const double side = partition.domain().side(c);
        double loss = 0.0;
        double prev = partition.domain().lo[c];
        for (std::size_t i = 0; i <= s.size(); ++i) {
            const double next = i < s.size() ? s[i] : partition.domain().hi[c];
            loss += (next - prev) * (next - prev) / (4.0 * side);
            prev = next;
        }
        return {loss, 0.0};
    }
    GridProjector projector(partition, spec, f);
    const PointSet pts = spec.sample(samples, stream);
    std::vector<double> gaps(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto x = pts[i];
        gaps[i] = std::abs(projector.value_at_intervals(partition.cell_of(x)) - f.evaluate(x));
    }
    return mc_mean(gaps);
}

McEstimate l1_loss(const CornerPartitionExact& partition, const LipschitzWitness& f,
                   const MeasureSpec& spec, std::size_t samples, SeededStream stream) {
    CornerProjector projector(partition, f);
    const PointSet pts = spec.sample(samples, stream);
    std::vector<double> gaps(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto x = pts[i];
        gaps[i] = std::abs(projector.value_at_cell(partition.cell_of(x)) - f.evaluate(x));
    }
    return mc_mean(gaps);
}

McEstimate l1_loss(const SignaturePartition& partition, const LipschitzWitness& f) {
    const auto values = signature_cell_means(partition, f);
    const PointSet& pts = partition.reference_points();
    std::vector<double> gaps(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        gaps[i] = std::abs(values[partition.cell_of_point(i)] - f.evaluate(pts[i]));
    return mc_mean(gaps);
}

double exact_loss_1d_symmetric(std::vector<double> sample_coords) {
    for (double x : sample_coords)
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("exact loss: coords must lie in [0,1]");
    sample_coords.push_back(0.0);
    sample_coords.push_back(1.0);
    std::sort(sample_coords.begin(), sample_coords.end());
    double loss = 0.0;
    for (std::size_t i = 0; i + 1 < sample_coords.size(); ++i) {
        const double gap = sample_coords[i + 1] - sample_coords[i];
        loss += gap * gap / 4.0;
    }
    return loss;
}

RateReport rate_experiment(Scheme scheme, int d, const MeasureSpec& spec,
                           const std::vector<LipschitzWitness>& witnesses,
                           const std::vector<std::size_t>& schedule, const RateOptions& options,
                           SeededStream stream) {
    if (schedule.empty() || !std::is_sorted(schedule.begin(), schedule.end()))
        throw ConfigError("rate experiment: schedule must be nonempty and increasing");
    if (options.trials == 0) throw ConfigError("rate experiment: trials >= 1 required");
    if (witnesses.empty()) throw ConfigError("rate experiment: need at least one witness");
    if (spec.dim() != d) throw ConfigError("rate experiment: measure dimension mismatch");

    const std::size_t n_max = schedule.back();
    const std::size_t n_schedule = schedule.size();
    struct Row {
        double loss = 0.0, loss_se = 0.0, diam = 0.0, diam_se = 0.0;
    };
    std::vector<Row> rows(options.trials * n_schedule);

    parallel_for(options.trials, options.threads, [&](std::size_t trial) {
        SeededStream ts = stream.derived(trial);
        const PointSet path = spec.sample(n_max, ts.derived(0));
        const PointSet eval = spec.sample(options.eval_samples, ts.derived(1));
        std::vector<double> gaps(eval.size());

        if (scheme == Scheme::SymmetricGrid) {
            for (std::size_t s = 0; s < n_schedule; ++s) {
                PointSet prefix(path.dim);
                prefix.coords.assign(path.coords.begin(),
                                     path.coords.begin() + schedule[s] * path.dim);
                const GridPartition grid = GridPartition::from_points(prefix, spec.domain());
                std::vector<std::vector<int>> cells(eval.size());
                for (std::size_t i = 0; i < eval.size(); ++i) cells[i] = grid.cell_of(eval[i]);

                double best = -1.0, best_se = 0.0;
                for (const auto& f : witnesses) {
                    double value, se;
                    if (f.kind() == LipschitzWitness::Kind::Coordinate &&
                        spec.kind() == MeasureKind::UniformBox) {
                        value = l1_loss(grid, f, spec, 0, ts).estimate;
                        se = 0.0;
                    } else {
                        GridProjector projector(grid, spec, f);
                        for (std::size_t i = 0; i < eval.size(); ++i)
                            gaps[i] = std::abs(projector.value_at_intervals(cells[i]) -
                                               f.evaluate(eval[i]));
                        const auto est = mc_mean(gaps);
                        value = est.estimate;
                        se = est.std_error;
                    }
                    if (value > best) {
                        best = value;
                        best_se = se;
                    }
                }
                Row& row = rows[trial * n_schedule + s];
                row.loss = best;
                row.loss_se = best_se;
                if (d <= 2) {
                    row.diam = grid.diameter_bound(spec);
                    row.diam_se = 0.0;
                } else {
                    const auto [est, se] =
                        grid.estimate_diameter_bound(spec, options.eval_samples, ts.derived(2));
                    row.diam = est;
                    row.diam_se = se;
                }
            }
            return;
        }

        // Asymmetric corner scheme.
        if (d <= 2 && spec.is_product() && spec.kind() != MeasureKind::Gaussian) {
            for (std::size_t s = 0; s < n_schedule; ++s) {
                PointSet prefix(path.dim);
                prefix.coords.assign(path.coords.begin(),
                                     path.coords.begin() + schedule[s] * path.dim);
                const auto part = CornerPartitionExact::build(prefix, spec);
                std::vector<std::size_t> cells(eval.size());
                for (std::size_t i = 0; i < eval.size(); ++i)
                    cells[i] = part.cell_of(eval[i]);

                double best = -1.0, best_se = 0.0;
                for (const auto& f : witnesses) {
                    CornerProjector projector(part, f);
                    for (std::size_t i = 0; i < eval.size(); ++i)
                        gaps[i] =
                            std::abs(projector.value_at_cell(cells[i]) - f.evaluate(eval[i]));
                    const auto est = mc_mean(gaps);
                    if (est.estimate > best) {
                        best = est.estimate;
                        best_se = est.std_error;
                    }
                }
                Row& row = rows[trial * n_schedule + s];
                row.loss = best;
                row.loss_se = best_se;
                row.diam = part.diameter_bound();
                row.diam_se = 0.0;
            }
            return;
        }

        // General-dimension fallback: signature partition along the path.
        auto part = build_corner_partition(PointSet(spec.dim()), spec, options.reference_size,
                                           ts.derived(1));
        std::size_t added = 0;
        for (std::size_t s = 0; s < n_schedule; ++s) {
            for (; added < schedule[s]; ++added) {
                const auto p = path[added];
                part = std::move(part).refined(
                    GeneratorSet::corner_box(std::vector<double>(p.begin(), p.end())));
            }
            double best = -1.0, best_se = 0.0;
            for (const auto& f : witnesses) {
                const auto est = l1_loss(part, f);
                if (est.estimate > best) {
                    best = est.estimate;
                    best_se = est.std_error;
                }
            }
            Row& row = rows[trial * n_schedule + s];
            row.loss = best;
            row.loss_se = best_se;
            row.diam = part.diameter_bound();
            row.diam_se = 0.0;
        }
    });

    RateReport report;
    report.scheme = scheme;
    report.d = d;
    for (const auto& f : witnesses)
        report.lipschitz_bound = std::max(report.lipschitz_bound, f.lipschitz());

    for (std::size_t s = 0; s < n_schedule; ++s) {
        std::vector<double> losses(options.trials), diams(options.trials);
        for (std::size_t t = 0; t < options.trials; ++t) {
            losses[t] = rows[t * n_schedule + s].loss;
            diams[t] = rows[t * n_schedule + s].diam;
        }
        const auto l = mc_mean(losses);
        const auto dm = mc_mean(diams);
        report.points.push_back({schedule[s], l.estimate, l.std_error, dm.estimate,
                                 dm.std_error});
    }
    if (options.keep_trial_rows) {
        for (std::size_t t = 0; t < options.trials; ++t)
            for (std::size_t s = 0; s < n_schedule; ++s) {
                const Row& r = rows[t * n_schedule + s];
                report.trial_rows.push_back(
                    {t, schedule[s], r.loss, r.loss_se, r.diam, r.diam_se});
            }
    }

    // Slope over the largest decade of the schedule.
    std::vector<double> lx, ly;
    for (const auto& p : report.points)
        if (p.n * 10 >= n_max && p.mean_loss > 0.0) {
            lx.push_back(std::log(static_cast<double>(p.n)));
            ly.push_back(std::log(p.mean_loss));
        }
    if (lx.size() < 2) {
        lx.clear();
        ly.clear();
        for (const auto& p : report.points)
            if (p.mean_loss > 0.0) {
                lx.push_back(std::log(static_cast<double>(p.n)));
                ly.push_back(std::log(p.mean_loss));
            }
    }
    if (lx.size() >= 2) report.slope = fit_line(lx, ly);
    return report;
}

}  // namespace sigfield
