#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include "shnol/error.hpp"

namespace shnol {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Grid: strictly increasing 1D nodes.

class Grid {
public:
    explicit Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 3)
            throw error("invalid-range", "grid needs at least 3 nodes");
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            if (!(nodes_[i] < nodes_[i + 1]))
                throw error("invalid-range", "grid nodes must be strictly increasing");
        }
    }

    std::size_t count() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double x_lo() const noexcept { return nodes_.front(); }
    double x_hi() const noexcept { return nodes_.back(); }
    double width(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }

private:
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(std::vector<double> nodes) {
    return std::make_shared<Grid>(std::move(nodes));
}

struct Grading {
    enum class Kind { uniform, geometric } kind = Kind::uniform;
    double ratio = 1.0;

    static Grading uniform() { return {}; }
    static Grading geometric(double ratio) {
        if (!(ratio > 0.0))
            throw error("invalid-parameter", "geometric grading ratio must be positive");
        return {Kind::geometric, ratio};
    }
};

// Cell widths grow by `ratio` from x_lo to x_hi, so ratio > 1 concentrates
// nodes near x_lo.
inline GridPtr make_graded_grid(double x_lo, double x_hi, std::size_t n_cells,
                                Grading grading = Grading::uniform()) {
    if (!(x_lo < x_hi))
        throw error("invalid-range", "make_graded_grid requires x_lo < x_hi");
    if (n_cells < 2)
        throw error("invalid-range", "make_graded_grid requires at least 2 cells");

    std::vector<double> nodes(n_cells + 1);
    const double span = x_hi - x_lo;
    const double r = grading.ratio;
    if (grading.kind == Grading::Kind::uniform || r == 1.0) {
        for (std::size_t i = 0; i <= n_cells; ++i)
            nodes[i] = x_lo + span * static_cast<double>(i) / static_cast<double>(n_cells);
    } else {
        // first width w solves w (r^n - 1) / (r - 1) = span
        const double w0 = span * (r - 1.0) / (std::pow(r, static_cast<double>(n_cells)) - 1.0);
        double x = x_lo;
        double w = w0;
        nodes[0] = x_lo;
        for (std::size_t i = 1; i <= n_cells; ++i) {
            x += w;
            w *= r;
            nodes[i] = x;
        }
    }
    nodes.front() = x_lo;
    nodes.back() = x_hi;
    return make_grid(std::move(nodes));
}

// ---------------------------------------------------------------------------
// GridFunction: nodal samples tied to a grid.

struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid || values.size() != grid->count())
            throw error("grid-mismatch", "value count does not match grid");
    }
};

inline GridFunction make_constant(const GridPtr& grid, double value) {
    return {grid, std::vector<double>(grid->count(), value)};
}

template <typename F>
GridFunction sample(const GridPtr& grid, F&& f) {
    std::vector<double> v(grid->count());
    for (std::size_t i = 0; i < grid->count(); ++i) v[i] = f((*grid)[i]);
    return {grid, std::move(v)};
}

inline bool same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.grid == g.grid) return true;
    if (!f.grid || !g.grid) return false;
    return f.grid->nodes() == g.grid->nodes();
}

inline void require_same_grid(const GridFunction& f, const GridFunction& g, const char* op) {
    if (!same_grid(f, g))
        throw error("grid-mismatch", std::string(op) + ": operands live on different grids");
}

// ---------------------------------------------------------------------------
// LogQuantity: sign plus natural log of the magnitude, for values whose
// linear representation can overflow or underflow.

struct LogQuantity {
    int sign = 0;                   // -1, 0, +1
    double log_magnitude = kNegInf;  // natural log of |value|; -inf when sign == 0

    static LogQuantity from_value(double v) {
        if (v == 0.0) return {};
        return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
    }

    static LogQuantity from_log(int sign, double log_magnitude) {
        if (sign == 0) return {};
        return {sign, log_magnitude};
    }

    double value() const {
        if (sign == 0) return 0.0;
        return static_cast<double>(sign) * std::exp(log_magnitude);
    }
};

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// log(e^a - e^b) for a >= b; returns -inf when a == b.
inline double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

inline LogQuantity lq_add(const LogQuantity& a, const LogQuantity& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.sign == b.sign)
        return {a.sign, log_add_exp(a.log_magnitude, b.log_magnitude)};
    if (a.log_magnitude == b.log_magnitude) return {};
    if (a.log_magnitude > b.log_magnitude)
        return {a.sign, log_sub_exp(a.log_magnitude, b.log_magnitude)};
    return {b.sign, log_sub_exp(b.log_magnitude, a.log_magnitude)};
}

inline LogQuantity lq_mul(const LogQuantity& a, const LogQuantity& b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_magnitude + b.log_magnitude};
}

inline LogQuantity lq_div(const LogQuantity& a, const LogQuantity& b) {
    if (b.sign == 0) throw error("invalid-parameter", "LogQuantity division by zero");
    if (a.sign == 0) return {};
    return {a.sign * b.sign, a.log_magnitude - b.log_magnitude};
}

inline LogQuantity lq_sqrt(const LogQuantity& a) {
    if (a.sign < 0) throw error("negative-radicand", "LogQuantity sqrt of negative value");
    if (a.sign == 0) return {};
    return {1, 0.5 * a.log_magnitude};
}

// ---------------------------------------------------------------------------
// Quadrature and finite differences.

// Trapezoid rule for integral of f * weight dx on the shared grid.
inline double integrate(const GridFunction& f, const GridFunction& weight) {
    require_same_grid(f, weight, "integrate");
    for (double w : weight.values)
        if (w < 0.0)
            throw error("invalid-parameter", "integrate: weight must be nonnegative");
    const auto& x = f.grid->nodes();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double gi = f.values[i] * weight.values[i];
        const double gj = f.values[i + 1] * weight.values[i + 1];
        acc += 0.5 * (gi + gj) * (x[i + 1] - x[i]);
    }
    return acc;
}

// Trapezoid rule in the log domain: f_log holds nodal values, dx the cell
// widths. Accumulation never leaves log space, so magnitudes up to e^(1e6)
// are fine.
inline LogQuantity integrate_log(const std::vector<LogQuantity>& f_log,
                                 const std::vector<double>& dx) {
    if (dx.size() + 1 != f_log.size())
        throw error("length-mismatch", "integrate_log: dx must have one entry per cell");
    double pos = kNegInf;
    double neg = kNegInf;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(dx[i] > 0.0))
            throw error("invalid-parameter", "integrate_log: cell widths must be positive");
        const double ldx = std::log(0.5 * dx[i]);
        for (const LogQuantity* q : {&f_log[i], &f_log[i + 1]}) {
            if (q->sign > 0)
                pos = log_add_exp(pos, q->log_magnitude + ldx);
            else if (q->sign < 0)
                neg = log_add_exp(neg, q->log_magnitude + ldx);
        }
    }
    if (pos == kNegInf && neg == kNegInf) return {};
    if (neg == kNegInf) return {1, pos};
    if (pos == kNegInf) return {-1, neg};
    if (pos == neg) return {};
    return pos > neg ? LogQuantity{1, log_sub_exp(pos, neg)}
                     : LogQuantity{-1, log_sub_exp(neg, pos)};
}

// Second-order finite differences on a nonuniform grid, one-sided at ends.
// Stencils are written on value differences so constants differentiate to
// exactly zero instead of O(eps/h) rounding noise.
inline GridFunction derivative(const GridFunction& f) {
    const auto& x = f.grid->nodes();
    const auto& v = f.values;
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1];
        const double hr = x[i + 1] - x[i];
        d[i] = -hr / (hl * (hl + hr)) * (v[i - 1] - v[i]) +
               hl / (hr * (hl + hr)) * (v[i + 1] - v[i]);
    }
    {
        const double h1 = x[1] - x[0];
        const double h2 = x[2] - x[1];
        d[0] = (h1 + h2) / (h1 * h2) * (v[1] - v[0]) -
               h1 / (h2 * (h1 + h2)) * (v[2] - v[0]);
    }
    {
        const double h1 = x[n - 1] - x[n - 2];
        const double h2 = x[n - 2] - x[n - 3];
        d[n - 1] = (h1 + h2) / (h1 * h2) * (v[n - 1] - v[n - 2]) -
                   h1 / (h2 * (h1 + h2)) * (v[n - 1] - v[n - 3]);
    }
    return {f.grid, std::move(d)};
}

// ---------------------------------------------------------------------------
// Node windows.

// Inclusive index range of nodes with x in [x_lo, x_hi]; first > last when
// the window contains no node.
inline std::pair<std::size_t, std::size_t> window_node_range(const Grid& grid, double x_lo,
                                                             double x_hi) {
    const auto& x = grid.nodes();
    const auto lo = std::lower_bound(x.begin(), x.end(), x_lo);
    const auto hi = std::upper_bound(x.begin(), x.end(), x_hi);
    if (lo >= hi) return {1, 0};
    return {static_cast<std::size_t>(lo - x.begin()), static_cast<std::size_t>(hi - x.begin()) - 1};
}

inline double sup_abs_on(const GridFunction& f, double x_lo, double x_hi) {
    const auto [i0, i1] = window_node_range(*f.grid, x_lo, x_hi);
    if (i0 > i1) throw error("empty-window", "sup_abs_on: window contains no grid node");
    double m = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) m = std::max(m, std::abs(f.values[i]));
    return m;
}

inline double inf_abs_on(const GridFunction& f, double x_lo, double x_hi) {
    const auto [i0, i1] = window_node_range(*f.grid, x_lo, x_hi);
    if (i0 > i1) throw error("empty-window", "inf_abs_on: window contains no grid node");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = i0; i <= i1; ++i) m = std::min(m, std::abs(f.values[i]));
    return m;
}

}  // namespace shnol
