#include "sigfield/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigfield/errors.hpp"
#include "sigfield/parallel.hpp"

namespace sigfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCutTol = 1e-12;

void require_centered(const MeasureSpec& spec) {
    if (spec.dim() != 1) throw ConfigError("embedding: 1D target required");
    const double m = spec.mean();
    if (std::abs(m) > 1e-9)
        throw ValidationError(
            "embedding target must have mean 0 (got mean " + std::to_string(m) +
            "); shift the measure by its mean before embedding");
}

std::vector<double> dedup_sorted(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs)
        if (out.empty() || x - out.back() > kCutTol) out.push_back(x);
    return out;
}

}  // namespace

double BarrierSequence::projected_second_moment(std::size_t k) const {
    const BarrierLevel& lvl = levels_.at(k);
    double s = 0.0;
    for (std::size_t i = 0; i < lvl.values.size(); ++i)
        s += lvl.masses[i] * lvl.values[i] * lvl.values[i];
    return s;
}

BarrierLevel barriers_from_cuts(const MeasureSpec& spec, std::vector<double> cuts) {
    require_centered(spec);
    BarrierLevel lvl;
    lvl.cuts = dedup_sorted(std::move(cuts));
    double prev = -kInf;
    for (std::size_t i = 0; i <= lvl.cuts.size(); ++i) {
        const double next = i < lvl.cuts.size() ? lvl.cuts[i] : kInf;
        const double lo = prev;
        prev = next;
        const double mass = spec.interval_mass(lo, next);
        if (!(mass > 0.0)) continue;
        lvl.values.push_back(spec.conditional_mean(lo, next));
        lvl.masses.push_back(mass);
    }
    return lvl;
}

BarrierSequence dubins_levels(const MeasureSpec& spec, std::size_t depth) {
    require_centered(spec);
    std::vector<BarrierLevel> levels;
    levels.push_back(barriers_from_cuts(spec, {}));
    std::vector<double> cuts;
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& prev = levels.back();
        cuts.insert(cuts.end(), prev.values.begin(), prev.values.end());
        cuts = dedup_sorted(std::move(cuts));
        levels.push_back(barriers_from_cuts(spec, cuts));
    }
    return BarrierSequence(spec, std::move(levels));
}

BarrierSequence randomized_levels(const MeasureSpec& spec, const MeasureSpec& split_source,
                                  std::size_t depth, SeededStream stream) {
    require_centered(spec);
    if (!split_source.support_covers(spec))
        throw ConfigError("randomized embedding: split source must support-cover the target");
    const PointSet draws = split_source.sample(depth, stream);
    std::vector<BarrierLevel> levels;
    levels.push_back(barriers_from_cuts(spec, {}));
    std::vector<double> cuts;
    for (std::size_t k = 0; k < depth; ++k) {
        cuts.push_back(draws[k][0]);
        levels.push_back(barriers_from_cuts(spec, cuts));
    }
    return BarrierSequence(spec, std::move(levels));
}

EmbeddedChain chain_step(EmbeddedChain chain, const BarrierSequence& seq,
                         SeededStream& stream) {
    if (chain.level >= seq.depth())
        throw ConfigError("chain_step: chain already at the deepest level");
    const BarrierLevel& next = seq.level(chain.level + 1);
    const auto& v = next.values;
    const double x = chain.value;
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) {
        chain.level++;
        return chain;  // cell unsplit: same barrier persists
    }
    if (it == v.begin() || it == v.end())
        throw std::logic_error("chain_step: value outside the next level's barrier range");
    const double a = *(it - 1);
    const double b = *it;
    const double p_down = (b - x) / (b - a);
    chain.value = stream.next_double() < p_down ? a : b;
    chain.duration += (x - a) * (b - x);
    chain.level++;
    return chain;
}

EmbeddingResult run_embedding(const BarrierSequence& seq, std::size_t chains,
                              SeededStream stream, int threads) {
    if (chains == 0) throw ConfigError("run_embedding: chains >= 1 required");
    const std::size_t depth = seq.depth();
    EmbeddingResult result;
    result.terminal_values.resize(chains);

    // Fixed-size chunks make the reduction order independent of threads.
    constexpr std::size_t kChunk = 1024;
    const std::size_t n_chunks = (chains + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> chunk_sum(n_chunks), chunk_sum2(n_chunks);

    parallel_for(n_chunks, threads, [&](std::size_t chunk) {
        auto& sums = chunk_sum[chunk];
        auto& sums2 = chunk_sum2[chunk];
        sums.assign(depth + 1, 0.0);
        sums2.assign(depth + 1, 0.0);
        const std::size_t begin = chunk * kChunk;
        const std::size_t end = std::min(chains, begin + kChunk);
        for (std::size_t c = begin; c < end; ++c) {
            SeededStream cs = stream.derived(c);
            EmbeddedChain chain;
            chain.value = seq.level(0).values.front();
            for (std::size_t k = 0; k < depth; ++k) {
                chain = chain_step(chain, seq, cs);
                sums[k + 1] += chain.duration;
                sums2[k + 1] += chain.duration * chain.duration;
            }
            result.terminal_values[c] = chain.value;
        }
    });

    const double m = static_cast<double>(chains);
    for (std::size_t k = 0; k <= depth; ++k) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
            s += chunk_sum[chunk][k];
            s2 += chunk_sum2[chunk][k];
        }
        DepthSummary ds;
        ds.depth = k;
        ds.mean_duration = s / m;
        const double var = std::max(0.0, s2 / m - ds.mean_duration * ds.mean_duration);
        ds.duration_se = std::sqrt(var / m);
        ds.exact_projected_second_moment = seq.projected_second_moment(k);
        result.by_depth.push_back(ds);
    }
    result.mean_duration = result.by_depth.back().mean_duration;
    result.duration_se = result.by_depth.back().duration_se;
    return result;
}

PathSimResult simulate_continuous(const BarrierSequence& seq, const PathSimConfig& config) {
    if (!(config.dt > 0.0)) throw ConfigError("path simulation: dt must be positive");
    PathSimResult out;
    SeededStream stream = config.stream;
    const std::size_t steps = static_cast<std::size_t>(config.horizon / config.dt);
    out.times.reserve(steps + 1);
    out.values.reserve(steps + 1);
    out.times.push_back(0.0);
    out.values.push_back(0.0);
    const double sdt = std::sqrt(config.dt);
    for (std::size_t i = 0; i < steps; ++i) {
        out.times.push_back(static_cast<double>(i + 1) * config.dt);
        out.values.push_back(out.values.back() + sdt * stream.next_normal());
    }

    std::size_t level = 0;
    double pos_t = 0.0, pos_v = seq.level(0).values.front();
    std::size_t grid = 0;
    while (level < seq.depth()) {
        const auto& next = seq.level(level + 1).values;
        const auto it = std::lower_bound(next.begin(), next.end(), pos_v);
        if (it != next.end() && *it == pos_v) {
            level++;
            out.hits.push_back({level, pos_t, pos_v});
            continue;
        }
        if (it == next.begin() || it == next.end()) break;  // invariant violation guard
        const double a = *(it - 1);
        const double b = *it;
        bool found = false;
        // Scan segments from the current position; the first segment starts
        // mid-step at the previous crossing.
        double t0 = pos_t, v0 = pos_v;
        for (std::size_t i = grid; i + 1 <= steps && !found; ++i) {
            const double t1 = out.times[i + 1];
            const double v1 = out.values[i + 1];
            double cross = 0.0;
            bool hit_a = false, hit_b = false;
            if (v1 <= a) {
                hit_a = true;
                cross = a;
            } else if (v1 >= b) {
                hit_b = true;
                cross = b;
            }
            if (hit_a || hit_b) {
                const double frac = (cross - v0) / (v1 - v0);
                pos_t = t0 + frac * (t1 - t0);
                pos_v = cross;
                grid = i;  // the partial segment [pos_t, t1] is rescanned
                level++;
                out.hits.push_back({level, pos_t, pos_v});
                found = true;
            } else {
                t0 = t1;
                v0 = v1;
            }
        }
        if (!found) break;  // horizon exhausted: partial result
    }
    out.complete = level == seq.depth();
    return out;
}

double wasserstein1(std::vector<double> samples, const MeasureSpec& spec) {
    if (samples.empty()) throw ConfigError("wasserstein1: samples must be nonempty");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        acc += std::abs(samples[i] - spec.quantile(p));
    }
    return acc / n;
}

}  // namespace sigfield
