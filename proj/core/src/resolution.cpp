#include "sigfield/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigfield/errors.hpp"
#include "sigfield/parallel.hpp"

namespace sigfield {

TargetEvent TargetEvent::corner_box(std::vector<double> q, std::string id) {
    TargetEvent t;
    t.kind = Kind::CornerBox;
    t.corner = std::move(q);
    t.id = std::move(id);
    return t;
}

TargetEvent TargetEvent::ball(std::vector<double> center, double radius, std::string id) {
    if (!(radius > 0.0)) throw ConfigError("target ball: radius must be positive");
    TargetEvent t;
    t.kind = Kind::Ball;
    t.center = std::move(center);
    t.radius = radius;
    t.id = std::move(id);
    return t;
}

TargetEvent TargetEvent::membership(std::function<bool(std::span<const double>)> pred,
                                    std::string id) {
    TargetEvent t;
    t.kind = Kind::Predicate;
    t.predicate = std::move(pred);
    t.id = std::move(id);
    return t;
}

bool TargetEvent::contains(std::span<const double> x) const {
    switch (kind) {
        case Kind::CornerBox:
            for (std::size_t i = 0; i < corner.size(); ++i)
                if (x[i] > corner[i]) return false;
            return true;
        case Kind::Ball: {
            double s = 0.0;
            for (std::size_t i = 0; i < center.size(); ++i) {
                const double d = x[i] - center[i];
                s += d * d;
            }
            return s < radius * radius;
        }
        case Kind::Predicate:
            return predicate(x);
    }
    return false;
}

Box TargetEvent::as_box(const Box& domain) const {
    if (kind != Kind::CornerBox) throw ConfigError("target: not a corner box");
    return Box(domain.lo, corner);
}

BestApproximation best_approximation(const SignaturePartition& partition,
                                     const TargetEvent& target) {
    const PointSet& pts = partition.reference_points();
    const std::size_t n_cells = partition.cell_count();
    std::vector<std::uint64_t> cell_total(n_cells, 0), cell_hit(n_cells, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::uint32_t c = partition.cell_of_point(i);
        cell_total[c]++;
        if (target.contains(pts[i])) cell_hit[c]++;
    }
    BestApproximation out;
    out.in_union.resize(n_cells);
    std::uint64_t wrong = 0;
    for (std::size_t c = 0; c < n_cells; ++c) {
        const bool in = 2 * cell_hit[c] >= cell_total[c];  // ties included
        out.in_union[c] = in ? 1 : 0;
        wrong += in ? cell_total[c] - cell_hit[c] : cell_hit[c];
    }
    out.distance = static_cast<double>(wrong) / static_cast<double>(pts.size());
    return out;
}

BestApproximation best_approximation(const CornerPartitionExact& partition, const Box& target) {
    BestApproximation out;
    out.in_union.resize(partition.cell_count());
    double wrong = 0.0;
    for (std::size_t c = 0; c < partition.cell_count(); ++c) {
        const double m = partition.cell_mass(c);
        const double t = partition.cell_box_mass(c, target);
        const bool in = t >= 0.5 * m;
        out.in_union[c] = in ? 1 : 0;
        wrong += in ? m - t : t;
    }
    out.distance = wrong;
    return out;
}

BestApproximation best_approximation(const GridPartition& partition, const Box& target,
                                     const MeasureSpec& spec, double max_cells) {
    if (partition.cell_count() > max_cells)
        throw ConfigError("best_approximation: too many grid cells to enumerate");
    const int d = partition.dim();
    BestApproximation out;
    std::vector<int> idx(d, 0);
    double wrong = 0.0;
    while (true) {
        const Box cell = partition.cell_box(idx);
        const double m = spec.measure_of_box(cell);
        Box overlap = cell;
        bool empty = false;
        for (int c = 0; c < d; ++c) {
            overlap.lo[c] = std::max(cell.lo[c], target.lo[c]);
            overlap.hi[c] = std::min(cell.hi[c], target.hi[c]);
            if (!(overlap.hi[c] > overlap.lo[c])) empty = true;
        }
        const double t = empty ? 0.0 : spec.measure_of_box(overlap);
        // Zero-mass cells are excluded deterministically.
        const bool in = m > 0.0 && t >= 0.5 * m;
        out.in_union.push_back(in ? 1 : 0);
        wrong += in ? m - t : t;
        int c = 0;
        for (; c < d; ++c) {
            if (++idx[c] <= static_cast<int>(partition.splits(c).size())) break;
            idx[c] = 0;
        }
        if (c == d) break;
    }
    out.distance = wrong;
    return out;
}

McEstimate symmetric_difference(const MeasureSpec& spec,
                                const std::function<bool(std::span<const double>)>& a,
                                const std::function<bool(std::span<const double>)>& b,
                                std::size_t samples, SeededStream stream) {
    const PointSet pts = spec.sample(samples, stream);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (a(pts[i]) != b(pts[i])) wrong++;
    McEstimate e;
    const double m = static_cast<double>(samples);
    e.estimate = static_cast<double>(wrong) / m;
    e.std_error = std::sqrt(std::max(e.estimate * (1.0 - e.estimate), 0.0) / m);
    return e;
}

double symmetric_difference_boxes(const MeasureSpec& spec, const Box& a, const Box& b) {
    Box overlap = a;
    bool empty = false;
    for (int c = 0; c < a.dim(); ++c) {
        overlap.lo[c] = std::max(a.lo[c], b.lo[c]);
        overlap.hi[c] = std::min(a.hi[c], b.hi[c]);
        if (!(overlap.hi[c] > overlap.lo[c])) empty = true;
    }
    const double inter = empty ? 0.0 : spec.measure_of_box(overlap);
    return spec.measure_of_box(a) + spec.measure_of_box(b) - 2.0 * inter;
}

InnerBoxResult inner_box_approx(const PointSet& samples, std::span<const double> q) {
    InnerBoxResult out;
    const int d = static_cast<int>(q.size());
    std::vector<double> r;
    std::size_t dominated = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto x = samples[i];
        bool in = true;
        for (int c = 0; c < d && in; ++c) in = x[c] <= q[c];
        if (!in) continue;
        dominated++;
        if (r.empty()) {
            r.assign(x.begin(), x.end());
        } else {
            for (int c = 0; c < d; ++c) r[c] = std::max(r[c], x[c]);
        }
    }
    if (samples.size() > 0) {
        out.empirical_target_mass =
            static_cast<double>(dominated) / static_cast<double>(samples.size());
        out.empirical_inner_mass = out.empirical_target_mass;  // A_r picks up the same samples
    }
    if (!r.empty()) out.r = std::move(r);
    return out;
}

namespace {

struct TraceAccumulator {
    // distances[target][schedule][trial]
    std::vector<std::vector<std::vector<double>>> distances;

    TraceAccumulator(std::size_t targets, std::size_t schedule, std::size_t trials)
        : distances(targets, std::vector<std::vector<double>>(
                                 schedule, std::vector<double>(trials, 0.0))) {}

    std::vector<ConvergenceTrace> summarize(const std::vector<std::string>& ids,
                                            const std::vector<std::size_t>& schedule,
                                            double mc_floor) const {
        std::vector<ConvergenceTrace> traces;
        for (std::size_t t = 0; t < distances.size(); ++t) {
            ConvergenceTrace tr;
            tr.target_id = ids[t];
            tr.trials = distances[t].empty() ? 0 : distances[t][0].size();
            tr.mc_floor = mc_floor;
            for (std::size_t s = 0; s < schedule.size(); ++s) {
                const auto& xs = distances[t][s];
                const double m = static_cast<double>(xs.size());
                double mean = 0.0;
                for (double x : xs) mean += x;
                mean /= m;
                double var = 0.0;
                for (double x : xs) var += (x - mean) * (x - mean);
                var = xs.size() > 1 ? var / (m - 1.0) : 0.0;
                tr.points.push_back({schedule[s], mean, std::sqrt(var / m)});
            }
            traces.push_back(std::move(tr));
        }
        return traces;
    }
};

bool exact_trace_supported(const MeasureSpec& spec, const std::vector<TargetEvent>& targets) {
    if (!spec.is_product() || spec.kind() == MeasureKind::Gaussian) return false;
    if (spec.dim() > 2) return false;
    for (const auto& t : targets)
        if (t.kind != TargetEvent::Kind::CornerBox) return false;
    return true;
}

}  // namespace

std::vector<ConvergenceTrace> monotone_convergence_trace(
    const MeasureSpec& spec, const std::vector<TargetEvent>& targets,
    const std::vector<std::size_t>& schedule, const TraceOptions& options,
    SeededStream stream) {
    if (schedule.empty()) throw ConfigError("trace: schedule must be nonempty");
    if (!std::is_sorted(schedule.begin(), schedule.end()))
        throw ConfigError("trace: schedule must be increasing");
    const std::size_t n_max = schedule.back();
    const bool exact = exact_trace_supported(spec, targets);

    TraceAccumulator acc(targets.size(), schedule.size(), options.trials);
    parallel_for(options.trials, options.threads, [&](std::size_t trial) {
        SeededStream trial_stream = stream.derived(trial);
        const PointSet path = spec.sample(n_max, trial_stream.derived(0));
        if (exact) {
            for (std::size_t s = 0; s < schedule.size(); ++s) {
                PointSet prefix(path.dim);
                prefix.coords.assign(path.coords.begin(),
                                     path.coords.begin() + schedule[s] * path.dim);
                const auto part = CornerPartitionExact::build(prefix, spec);
                for (std::size_t t = 0; t < targets.size(); ++t) {
                    const Box b = targets[t].as_box(spec.domain());
                    acc.distances[t][s][trial] = best_approximation(part, b).distance;
                }
            }
            return;
        }
        auto part = build_corner_partition(PointSet(spec.dim()), spec, options.reference_size,
                                           trial_stream.derived(1));
        std::size_t added = 0;
        for (std::size_t s = 0; s < schedule.size(); ++s) {
            for (; added < schedule[s]; ++added) {
                const auto p = path[added];
                part = std::move(part).refined(
                    GeneratorSet::corner_box(std::vector<double>(p.begin(), p.end())));
            }
            for (std::size_t t = 0; t < targets.size(); ++t)
                acc.distances[t][s][trial] = best_approximation(part, targets[t]).distance;
        }
    });

    std::vector<std::string> ids;
    for (std::size_t t = 0; t < targets.size(); ++t)
        ids.push_back(targets[t].id.empty() ? "target-" + std::to_string(t) : targets[t].id);
    const double floor =
        exact ? 0.0 : 1.0 / std::sqrt(static_cast<double>(options.reference_size));
    return acc.summarize(ids, schedule, floor);
}

ConvergenceTrace ball_convergence_trace(const MeasureSpec& spec, const RadiusSpec& radius_spec,
                                        const TargetEvent& target,
                                        const std::vector<std::size_t>& schedule,
                                        const TraceOptions& options, SeededStream stream) {
    if (schedule.empty()) throw ConfigError("trace: schedule must be nonempty");
    const std::size_t n_max = schedule.back();

    TraceAccumulator acc(1, schedule.size(), options.trials);
    parallel_for(options.trials, options.threads, [&](std::size_t trial) {
        SeededStream trial_stream = stream.derived(trial);
        const PointSet centers = spec.sample(n_max, trial_stream.derived(0));
        SeededStream radius_stream = trial_stream.derived(2);
        std::vector<double> radii(n_max);
        for (std::size_t i = 0; i < n_max; ++i) radii[i] = radius_spec.sample(radius_stream);

        auto part = build_ball_partition(PointSet(spec.dim()), {}, spec, options.reference_size,
                                         trial_stream.derived(1));
        std::size_t added = 0;
        for (std::size_t s = 0; s < schedule.size(); ++s) {
            for (; added < schedule[s]; ++added) {
                const auto p = centers[added];
                part = std::move(part).refined(GeneratorSet::ball(
                    std::vector<double>(p.begin(), p.end()), radii[added]));
            }
            acc.distances[0][s][trial] = best_approximation(part, target).distance;
        }
    });

    const double floor = 1.0 / std::sqrt(static_cast<double>(options.reference_size));
    auto traces = acc.summarize({target.id.empty() ? "ball-target" : target.id}, schedule, floor);
    return std::move(traces.front());
}

AdversarialWitness adversarial_witness(std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts)
        if (!(c > 0.0 && c < 1.0)) throw ConfigError("adversarial witness: cuts must lie in (0,1)");
    AdversarialWitness w;
    w.boundaries.push_back(0.0);
    for (double c : cuts)
        if (w.boundaries.back() != c) w.boundaries.push_back(c);
    w.boundaries.push_back(1.0);

    // On each cell [a,b) the function is +1 on the first half and -1 on the
    // second; both half-lengths are the same computed double, so the cell
    // mean is exactly zero and E[f | F_n] is the zero function.
    bool all_zero = true;
    for (std::size_t k = 0; k + 1 < w.boundaries.size(); ++k) {
        const double a = w.boundaries[k], b = w.boundaries[k + 1];
        const double half = 0.5 * (b - a);
        const double integral = half - half;
        const double mean = (b - a) > 0.0 ? integral / (b - a) : 0.0;
        w.cell_means.push_back(mean);
        if (mean != 0.0) all_zero = false;
    }
    if (all_zero) {
        // |E[f|F_n] - f| = |f| = 1 pointwise, so the L1 gap is the domain length.
        w.loss = 1.0;
    } else {
        double loss = 0.0;
        for (std::size_t k = 0; k + 1 < w.boundaries.size(); ++k) {
            const double a = w.boundaries[k], b = w.boundaries[k + 1];
            const double half = 0.5 * (b - a);
            const double c = w.cell_means[k];
            loss += std::abs(c - 1.0) * half + std::abs(c + 1.0) * half;
        }
        w.loss = loss;
    }
    return w;
}

double AdversarialWitness::evaluate(double x) const {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
    std::size_t k = it == boundaries.begin()
                        ? 0
                        : static_cast<std::size_t>(it - boundaries.begin()) - 1;
    if (k + 1 >= boundaries.size()) k = boundaries.size() - 2;
    const double a = boundaries[k], b = boundaries[k + 1];
    return x < a + 0.5 * (b - a) ? 1.0 : -1.0;
}

}  // namespace sigfield
