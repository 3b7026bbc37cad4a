#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "shnol/operator.hpp"

namespace shnol {

// ---------------------------------------------------------------------------
// Double-double arithmetic. The Bessel power series below x = 18 cancels up
// to seven decimal digits; carrying the partial sums in ~32 digits keeps the
// final values comfortably inside the 1e-12 contract.

namespace dd {

struct Dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline Dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline Dd quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline Dd two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline Dd add(const Dd& a, const Dd& b) {
    Dd s = two_sum(a.hi, b.hi);
    return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline Dd neg(const Dd& a) { return {-a.hi, -a.lo}; }

inline Dd sub(const Dd& a, const Dd& b) { return add(a, neg(b)); }

inline Dd mul(const Dd& a, const Dd& b) {
    Dd p = two_prod(a.hi, b.hi);
    return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline Dd mul(const Dd& a, double b) {
    Dd p = two_prod(a.hi, b);
    return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline Dd div(const Dd& a, double b) {
    const double q = a.hi / b;
    Dd p = two_prod(q, b);
    const double e = ((a.hi - p.hi) - p.lo + a.lo) / b;
    return quick_two_sum(q, e);
}

inline double value(const Dd& a) { return a.hi + a.lo; }

inline constexpr Dd kGamma{0.5772156649015329, -4.942915152430645e-18};
inline constexpr Dd kPi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr Dd kTwoPi{6.283185307179586, 2.4492935982947064e-16};
inline constexpr Dd kPiOver4{0.7853981633974483, 3.061616997868383e-17};
inline constexpr Dd kThreePiOver4{2.356194490192345, 9.184850993605148e-17};
inline constexpr Dd kTwoOverPi{0.6366197723675814, -3.935735335036497e-17};

}  // namespace dd

// ---------------------------------------------------------------------------
// Bessel functions J0, J1, Y0, Y1: double-double power series for x < 18,
// Hankel asymptotic expansion beyond. At the crossover the asymptotic
// truncation error ~e^{-2x} has already dropped to ~2e-16, so both branches
// overlap far below the 1e-12 contract.

namespace detail {

inline constexpr double kBesselCrossover = 18.0;

inline dd::Dd j0_series_dd(double x) {
    const dd::Dd h = dd::two_prod(0.5 * x, 0.5 * x);  // (x/2)^2, exact split
    dd::Dd t{1.0, 0.0}, s{1.0, 0.0};
    for (int k = 1; k < 256; ++k) {
        t = dd::div(dd::mul(t, h), -static_cast<double>(k) * k);
        s = dd::add(s, t);
        if (std::abs(t.hi) < 1e-35 * std::abs(s.hi) + 1e-305) break;
    }
    return s;
}

inline dd::Dd j1_series_dd(double x) {
    const dd::Dd h = dd::two_prod(0.5 * x, 0.5 * x);
    dd::Dd t{1.0, 0.0}, s{1.0, 0.0};
    for (int k = 1; k < 256; ++k) {
        t = dd::div(dd::mul(t, h), -static_cast<double>(k) * (k + 1));
        s = dd::add(s, t);
        if (std::abs(t.hi) < 1e-35 * std::abs(s.hi) + 1e-305) break;
    }
    return dd::mul(s, 0.5 * x);
}

inline double j0_series(double x) { return dd::value(j0_series_dd(x)); }
inline double j1_series(double x) { return dd::value(j1_series_dd(x)); }

inline double y0_series(double x) {
    const dd::Dd h = dd::two_prod(0.5 * x, 0.5 * x);
    dd::Dd b{1.0, 0.0}, harmonic{0.0, 0.0}, s{0.0, 0.0};
    for (int k = 1; k < 256; ++k) {
        b = dd::div(dd::mul(b, h), static_cast<double>(k) * k);
        harmonic = dd::add(harmonic, dd::div(dd::Dd{1.0, 0.0}, k));
        const dd::Dd term = dd::mul(b, harmonic);
        s = (k % 2 == 1) ? dd::add(s, term) : dd::sub(s, term);
        if (std::abs(term.hi) < 1e-35 * std::abs(s.hi) + 1e-305) break;
    }
    const dd::Dd lg = dd::add(dd::Dd{std::log(0.5 * x), 0.0}, dd::kGamma);
    return dd::value(dd::mul(dd::add(dd::mul(lg, j0_series_dd(x)), s), dd::kTwoOverPi));
}

inline double y1_series(double x) {
    const dd::Dd h = dd::two_prod(0.5 * x, 0.5 * x);
    // sum_{k>=0} (-1)^k (H_k + H_{k+1}) h^k / (k! (k+1)!)
    dd::Dd b{1.0, 0.0}, ha{0.0, 0.0}, hb{1.0, 0.0};
    dd::Dd s{1.0, 0.0};  // k = 0 term: (H_0 + H_1) * 1 = 1
    for (int k = 1; k < 256; ++k) {
        b = dd::div(dd::mul(b, h), static_cast<double>(k) * (k + 1));
        ha = dd::add(ha, dd::div(dd::Dd{1.0, 0.0}, k));
        hb = dd::add(hb, dd::div(dd::Dd{1.0, 0.0}, k + 1));
        const dd::Dd term = dd::mul(b, dd::add(ha, hb));
        s = (k % 2 == 0) ? dd::add(s, term) : dd::sub(s, term);
        if (std::abs(term.hi) < 1e-35 * std::abs(s.hi) + 1e-305) break;
    }
    const dd::Dd lg = dd::add(dd::Dd{std::log(0.5 * x), 0.0}, dd::kGamma);
    dd::Dd y = dd::mul(dd::mul(lg, j1_series_dd(x)), dd::kTwoOverPi);
    y = dd::sub(y, dd::div(dd::kTwoOverPi, x));                            // 2/(pi x)
    y = dd::sub(y, dd::mul(dd::mul(s, dd::mul(dd::kTwoOverPi, 0.25)), x));  // (x/(2 pi)) s
    return dd::value(y);
}

struct HankelPQ {
    double p = 1.0;
    double q = 0.0;
};

inline HankelPQ hankel_pq(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    HankelPQ pq;
    double a = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(a) >= prev) break;  // truncate at the smallest term
        prev = std::abs(a);
        switch (k % 4) {
            case 1: pq.q += a; break;
            case 2: pq.p -= a; break;
            case 3: pq.q -= a; break;
            default: pq.p += a; break;
        }
        if (std::abs(a) < 1e-17) break;
    }
    return pq;
}

// x - phase, reduced mod 2 pi in double-double before rounding.
inline double hankel_phase(double x, const dd::Dd& phase) {
    const double n = std::nearbyint(x / 6.283185307179586);
    dd::Dd r = dd::sub(dd::Dd{x, 0.0}, dd::mul(dd::kTwoPi, n));
    return dd::value(dd::sub(r, phase));
}

inline double j_asymptotic(int nu, double x) {
    const auto pq = hankel_pq(nu, x);
    const double chi = hankel_phase(x, nu == 0 ? dd::kPiOver4 : dd::kThreePiOver4);
    return std::sqrt(0.6366197723675814 / x) * (pq.p * std::cos(chi) - pq.q * std::sin(chi));
}

inline double y_asymptotic(int nu, double x) {
    const auto pq = hankel_pq(nu, x);
    const double chi = hankel_phase(x, nu == 0 ? dd::kPiOver4 : dd::kThreePiOver4);
    return std::sqrt(0.6366197723675814 / x) * (pq.p * std::sin(chi) + pq.q * std::cos(chi));
}

inline double j0_asymptotic(double x) { return j_asymptotic(0, x); }
inline double j1_asymptotic(double x) { return j_asymptotic(1, x); }
inline double y0_asymptotic(double x) { return y_asymptotic(0, x); }
inline double y1_asymptotic(double x) { return y_asymptotic(1, x); }

}  // namespace detail

inline double bessel_j0(double x) {
    x = std::abs(x);
    return x < detail::kBesselCrossover ? detail::j0_series(x) : detail::j0_asymptotic(x);
}

inline double bessel_j1(double x) {
    const double ax = std::abs(x);
    const double v =
        ax < detail::kBesselCrossover ? detail::j1_series(ax) : detail::j1_asymptotic(ax);
    return x < 0.0 ? -v : v;
}

inline double bessel_y0(double x) {
    if (!(x > 0.0)) throw error("domain-error", "y0 requires x > 0");
    return x < detail::kBesselCrossover ? detail::y0_series(x) : detail::y0_asymptotic(x);
}

inline double bessel_y1(double x) {
    if (!(x > 0.0)) throw error("domain-error", "y1 requires x > 0");
    return x < detail::kBesselCrossover ? detail::y1_series(x) : detail::y1_asymptotic(x);
}

// Closed-form generalized eigenfunction of -u'' - (3/x) u' = lambda u:
// u(x) = (1/x) (A J_{-1}(sqrt(lambda) x) + B Y_{-1}(sqrt(lambda) x)) with
// J_{-1} = -J_1 and Y_{-1} = -Y_1.
inline double bessel_eigenfunction_oracle(double A, double B, double lambda, double x) {
    const double s = std::sqrt(lambda) * x;
    return -(A * bessel_j1(s) + B * bessel_y1(s)) / x;
}

// ---------------------------------------------------------------------------
// Coefficient evaluation off the nodes: analytic handles when present,
// otherwise linear interpolation of the sampled logs.

namespace detail {

class CoeffEval {
  public:
    explicit CoeffEval(const OperatorSpec& spec) : spec_(&spec) {
        const auto& x = spec.grid->nodes();
        span_ = x.back() - x.front();
    }

    double m(double x) const {
        if (spec_->m_of) return spec_->m_of(x);
        return std::exp(lerp(spec_->log_m, x));
    }

    double am(double x) const {
        if (spec_->a_of && spec_->m_of) return spec_->a_of(x) * spec_->m_of(x);
        return std::exp(lerp(spec_->log_a, x) + lerp(spec_->log_m, x));
    }

    double a(double x) const {
        if (spec_->a_of) return spec_->a_of(x);
        return std::exp(lerp(spec_->log_a, x));
    }

    double vw(double x) const {
        double v;
        if (spec_->V_of)
            v = spec_->V_of(x);
        else
            v = lerp(spec_->V, x);
        if (spec_->W_of)
            v += spec_->W_of(x);
        else if (spec_->has_W())
            v += lerp(spec_->W, x);
        return v;
    }

    // d log(am)/dx
    double dlog_am(double x) const {
        if (spec_->dlog_am) return spec_->dlog_am(x);
        const auto& xs = spec_->grid->nodes();
        const std::size_t c = cell(x);
        const double h = xs[c + 1] - xs[c];
        return (spec_->log_a[c + 1] + spec_->log_m[c + 1] - spec_->log_a[c] -
                spec_->log_m[c]) / h;
    }

  private:
    std::size_t cell(double x) const {
        const auto& xs = spec_->grid->nodes();
        if (x <= xs.front()) {
            if (x < xs.front() - 1e-9 * span_ && !analytic())
                throw error("invalid-range", "coefficient requested left of the sampled grid");
            return 0;
        }
        if (x >= xs.back()) {
            if (x > xs.back() + 1e-9 * span_ && !analytic())
                throw error("invalid-range", "coefficient requested right of the sampled grid");
            return xs.size() - 2;
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        return static_cast<std::size_t>(it - xs.begin()) - 1;
    }

    bool analytic() const { return static_cast<bool>(spec_->m_of) && spec_->a_of; }

    double lerp(const std::vector<double>& v, double x) const {
        const auto& xs = spec_->grid->nodes();
        const std::size_t c = cell(x);
        const double t =
            std::clamp((x - xs[c]) / (xs[c + 1] - xs[c]), 0.0, 1.0);
        return v[c] + t * (v[c + 1] - v[c]);
    }

    const OperatorSpec* spec_;
    double span_;
};

struct OdeState {
    double u;
    double p;  // conserved flux a m u'
};

// One RK4 step of u' = p/(am), p' = m (V + W - lambda) u.
inline OdeState rk4_step(const CoeffEval& co, double lambda, double x, double h,
                         const OdeState& y) {
    auto f = [&](double xx, const OdeState& s) {
        return OdeState{s.p / co.am(xx), co.m(xx) * (co.vw(xx) - lambda) * s.u};
    };
    const OdeState k1 = f(x, y);
    const OdeState k2 = f(x + 0.5 * h, {y.u + 0.5 * h * k1.u, y.p + 0.5 * h * k1.p});
    const OdeState k3 = f(x + 0.5 * h, {y.u + 0.5 * h * k2.u, y.p + 0.5 * h * k2.p});
    const OdeState k4 = f(x + h, {y.u + h * k3.u, y.p + h * k3.p});
    return {y.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            y.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

// March from node `from` to node `to` (either direction), landing exactly on
// every node in between and recording (u, p) there.
inline void march(const CoeffEval& co, double lambda, const Grid& grid, std::size_t from,
                  std::size_t to, double step, OdeState y, std::vector<double>& u_out,
                  std::vector<double>& p_out) {
    u_out[from] = y.u;
    p_out[from] = y.p;
    const int dir = to >= from ? 1 : -1;
    for (std::size_t i = from; i != to; i += dir) {
        const std::size_t j = i + dir;
        const double x0 = grid[i], x1 = grid[j];
        const double w = std::abs(x1 - x0);
        // tolerance keeps w == k*step from rounding up to k+1 substeps
        const auto nsub = static_cast<std::size_t>(std::ceil(w / step - 1e-9));
        const double h = (x1 - x0) / static_cast<double>(std::max<std::size_t>(nsub, 1));
        double x = x0;
        for (std::size_t s = 0; s + 1 < nsub; ++s) {
            y = rk4_step(co, lambda, x, h, y);
            x += h;
        }
        y = rk4_step(co, lambda, x, x1 - x, y);  // land exactly on the node
        if (std::abs(y.u) > 1e300 || std::abs(y.p) > 1e300)
            throw error("overflow", "ODE solution exceeded 1e300; renormalize or shrink range");
        u_out[j] = y.u;
        p_out[j] = y.p;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generalized eigenfunctions by shooting.

struct ShootingConfig {
    double x_start = 0.0;
    double u0 = 0.0;
    double du0 = 0.0;
    double step = 1e-3;  // fixed-step fourth-order one-step method
};

// Returns (u, a m u') sampled on the requested grid.
inline std::pair<GridFunction, GridFunction> integrate_ode_sl_flux(const OperatorSpec& spec,
                                                                   double lambda,
                                                                   const ShootingConfig& cfg,
                                                                   const GridPtr& grid) {
    if (!(cfg.step > 0.0))
        throw error("invalid-parameter", "shooting step must be positive");
    if (cfg.u0 == 0.0 && cfg.du0 == 0.0)
        throw error("invalid-parameter", "shooting initial data must not vanish");
    const auto& x = grid->nodes();
    const double span = x.back() - x.front();
    std::size_t start = grid->count();
    for (std::size_t i = 0; i < grid->count(); ++i)
        if (std::abs(x[i] - cfg.x_start) <= 1e-12 * span) {
            start = i;
            break;
        }
    if (start == grid->count())
        throw error("invalid-parameter", "shooting start is not a node of the output grid");

    detail::CoeffEval co(spec);
    std::vector<double> u(grid->count()), p(grid->count());
    const detail::OdeState init{cfg.u0, cfg.du0 * co.am(cfg.x_start)};
    detail::march(co, lambda, *grid, start, grid->count() - 1, cfg.step, init, u, p);
    if (start > 0) detail::march(co, lambda, *grid, start, 0, cfg.step, init, u, p);
    return {GridFunction{grid, std::move(u)}, GridFunction{grid, std::move(p)}};
}

inline GridFunction integrate_ode_sl(const OperatorSpec& spec, double lambda,
                                     const ShootingConfig& cfg, const GridPtr& grid) {
    return integrate_ode_sl_flux(spec, lambda, cfg, grid).first;
}

// ---------------------------------------------------------------------------
// Positive solution of minimal growth at the right end.

inline GridFunction minimal_growth_solution(const OperatorSpec& spec, double lambda,
                                            double x_far, const GridPtr& grid,
                                            double* kappa_sensitivity = nullptr) {
    const auto& x = grid->nodes();
    const double span = x.back() - x.front();
    if (!(x_far >= x.back() + 0.2 * span))
        throw error("invalid-parameter",
                    "x_far must exceed the grid's right edge by at least 20% of the span");

    detail::CoeffEval co(spec);
    const bool analytic = static_cast<bool>(spec.m_of) && spec.a_of;
    const double far_probe = analytic ? x_far : x.back();
    const double q_far = co.vw(far_probe) - lambda;

    if (std::abs(q_far) <= 1e-12 * (1.0 + std::abs(lambda))) {
        // potential-free tail: solutions are affine in the coordinate
        // s(x) = int dx/(am); minimal growth is the bounded branch.
        // The sampled fallback returns per-cell slopes, which hold at cell
        // midpoints; pair slope and abscissa consistently.
        const double x_slope =
            spec.dlog_am ? far_probe : 0.5 * (x[x.size() - 1] + x[x.size() - 2]);
        const double p_exp = co.dlog_am(x_slope) * x_slope;
        std::vector<double> u(grid->count(), 1.0);
        if (p_exp > 1.001) {
            // u(x) proportional to int_x^inf dt/(am), power-law tail beyond
            const double tail = x.back() / ((p_exp - 1.0) * co.am(x.back()));
            u.back() = tail;
            for (std::size_t i = grid->count() - 1; i > 0; --i) {
                const double w = x[i] - x[i - 1];
                const double mid = 0.5 * (x[i] + x[i - 1]);
                const double inc =
                    w / 6.0 * (1.0 / co.am(x[i - 1]) + 4.0 / co.am(mid) + 1.0 / co.am(x[i]));
                u[i - 1] = u[i] + inc;
            }
            const double u0 = u.front();
            for (double& v : u) v /= u0;
        }
        if (kappa_sensitivity) *kappa_sensitivity = 0.0;
        return {grid, std::move(u)};
    }

    if (!analytic && x_far > x.back())
        throw error("invalid-parameter",
                    "minimal growth beyond the grid needs analytic coefficients");

    const double kappa = std::sqrt(std::max(q_far, 0.0) / co.a(x_far)) +
                         0.5 * co.dlog_am(x_far);

    auto shoot = [&](double kap) {
        detail::OdeState y{1.0, -kap * co.am(x_far)};
        // extension segment down to the grid edge
        const double min_cell = [&] {
            double w = span;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) w = std::min(w, x[i + 1] - x[i]);
            return w;
        }();
        const double hstep = std::min(min_cell, 0.05 / std::max(std::abs(kap), 1.0));
        const auto nseg =
            static_cast<std::size_t>(std::ceil((x_far - x.back()) / hstep));
        const double h = -(x_far - x.back()) / static_cast<double>(std::max<std::size_t>(nseg, 1));
        double xx = x_far;
        for (std::size_t s = 0; s + 1 < nseg; ++s) {
            y = detail::rk4_step(co, lambda, xx, h, y);
            xx += h;
        }
        y = detail::rk4_step(co, lambda, xx, x.back() - xx, y);
        // then across the grid, rescaling against overflow (the ODE is linear)
        std::vector<double> u(grid->count()), p(grid->count());
        u.back() = y.u;
        p.back() = y.p;
        for (std::size_t i = grid->count() - 1; i > 0; --i) {
            if (std::abs(y.u) > 1e150) {
                const double s = 1.0 / std::abs(y.u);
                y.u *= s;
                y.p *= s;
                for (std::size_t j = i; j < grid->count(); ++j) {
                    u[j] *= s;
                    p[j] *= s;
                }
            }
            const double w = x[i] - x[i - 1];
            const auto nsub = static_cast<std::size_t>(std::ceil(w / hstep));
            const double hh = -w / static_cast<double>(std::max<std::size_t>(nsub, 1));
            double xc = x[i];
            for (std::size_t s = 0; s + 1 < nsub; ++s) {
                y = detail::rk4_step(co, lambda, xc, hh, y);
                xc += hh;
            }
            y = detail::rk4_step(co, lambda, xc, x[i - 1] - xc, y);
            u[i - 1] = y.u;
            p[i - 1] = y.p;
        }
        if (!(u.front() > 0.0))
            throw error("non-positive", "minimal growth solution is not positive; lambda sits "
                                        "above the bottom of the spectrum");
        const double u0 = u.front();
        for (double& v : u) v /= u0;
        return u;
    };

    auto u = shoot(kappa);
    for (double v : u)
        if (!(v > 0.0))
            throw error("non-positive", "minimal growth solution is not positive; lambda sits "
                                        "above the bottom of the spectrum");
    if (kappa_sensitivity) {
        const auto up = shoot(kappa * 1.01);
        const auto um = shoot(kappa * 0.99);
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, std::abs(up[i] - um[i]) / u[i]);
        *kappa_sensitivity = worst;
    }
    return {grid, std::move(u)};
}

// ---------------------------------------------------------------------------
// 1D minimal Green function at lambda = 0.

struct GreenFunction {
    double pole = 0.0;
    GridFunction left_solution;
    GridFunction right_solution;
    double normalization = 0.0;  // 1/(a m Wronskian) at the pole
};

inline double evaluate(const GreenFunction& g, double x, double y) {
    const auto& xs = g.left_solution.grid->nodes();
    auto lerp = [&xs](const GridFunction& f, double xv) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), xv);
        const std::size_t c = std::clamp<std::size_t>(
            static_cast<std::size_t>(it - xs.begin()), 1, xs.size() - 1) - 1;
        const double t = std::clamp((xv - xs[c]) / (xs[c + 1] - xs[c]), 0.0, 1.0);
        return f.values[c] + t * (f.values[c + 1] - f.values[c]);
    };
    return g.normalization * lerp(g.left_solution, std::min(x, y)) *
           lerp(g.right_solution, std::max(x, y));
}

inline GreenFunction green_function(const OperatorSpec& spec, double pole) {
    const auto& x = spec.grid->nodes();
    const double span = x.back() - x.front();
    if (!(pole > x.front() && pole < x.back()))
        throw error("invalid-parameter", "green_function pole must lie inside the grid");
    {
        const auto bottom = eigenvalues_tridiagonal(discretize(spec), 1);
        if (bottom[0] < -1e-6)
            throw error("invalid-parameter", "green_function requires a nonnegative operator");
    }

    detail::CoeffEval co(spec);

    // left solution: the regular (or left-minimal) branch
    GridFunction u_left{spec.grid, std::vector<double>(x.size(), 1.0)};
    const double q_lo = co.vw(x.front());
    if (!spec.singular_lo && std::abs(q_lo) > 1e-12) {
        const double kap = std::sqrt(std::max(q_lo, 0.0) / co.a(x.front()));
        ShootingConfig cfg{x.front(), 1.0, kap, std::min(1e-2, 0.25 * spec.grid->width(0))};
        u_left = integrate_ode_sl(spec, 0.0, cfg, spec.grid);
    }

    auto u_right = minimal_growth_solution(spec, 0.0, x.back() + 0.25 * span, spec.grid);

    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(u_left.values[i] > 0.0) || !(u_right.values[i] > 0.0))
            throw error("non-positive", "green_function: solutions must stay positive");
    }

    // flux Wronskian u_l p_r - p_l u_r at the node nearest the pole
    const auto dl = derivative(u_left);
    const auto dr = derivative(u_right);
    std::size_t ip = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i] - pole) < std::abs(x[ip] - pole)) ip = i;
    const double am_p = co.am(x[ip]);
    const double wr = am_p * (u_left.values[ip] * dr.values[ip] -
                              dl.values[ip] * u_right.values[ip]);
    const double scale = std::max(am_p * (std::abs(u_left.values[ip] * dr.values[ip]) +
                                          std::abs(dl.values[ip] * u_right.values[ip])),
                                  am_p * u_left.values[ip] * u_right.values[ip] / span);
    if (std::abs(wr) < 1e-10 * scale)
        throw error("critical-operator",
                    "green_function: the two minimal solutions coincide (no Green function)");

    GreenFunction g;
    g.pole = pole;
    g.left_solution = std::move(u_left);
    g.right_solution = std::move(u_right);
    g.normalization = 1.0 / std::abs(wr);
    return g;
}

}  // namespace shnol
