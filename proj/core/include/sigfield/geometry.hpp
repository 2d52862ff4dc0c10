#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sigfield {

// Axis-aligned box in R^d.  Interval semantics for mass computations are
// half-open (lo, hi] per coordinate, matching the "x <= split" convention
// used by every generator set; for absolutely continuous measures the
// distinction carries no mass.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_)
        : lo(std::move(lo_)), hi(std::move(hi_)) {}

    static Box unit(int d) {
        return Box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
    }
    static Box interval(double a, double b) { return Box({a}, {b}); }

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(std::span<const double> x) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    double side(int i) const { return hi[i] - lo[i]; }

    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= side(i);
        return v;
    }

    double diameter() const {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += side(i) * side(i);
        return std::sqrt(s);
    }
};

// Flat row-major point storage; avoids one allocation per sample.
struct PointSet {
    int dim = 0;
    std::vector<double> coords;

    PointSet() = default;
    explicit PointSet(int d) : dim(d) {}

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    bool empty() const { return coords.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
    }

    void push_back(std::span<const double> p) {
        coords.insert(coords.end(), p.begin(), p.end());
    }
    void push_back(std::initializer_list<double> p) {
        coords.insert(coords.end(), p.begin(), p.end());
    }

    void reserve(std::size_t n) { coords.reserve(n * dim); }
};

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(sq_distance(a, b));
}

}  // namespace sigfield
