#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shnol/operator.hpp"

namespace shnol {

// ---------------------------------------------------------------------------
// Evans potential: the 1D harmonic exhaustion coordinate
// E(x) = 1/2 + int_base^x ds/(a m h^2), increasing outward from the base cut.
//
// Increments use the per-cell harmonic mean of 1/(a m h^2), which makes the
// discrete flux (a m h^2) E' exactly constant: capacitor energies then
// telescope to closed form on any grid. `scale` and `offset` describe the
// affine map from this canonical frame to the scenario's native frame
// (native = scale * E + offset); schedules quote pairs in the native frame.

struct EvansPotential {
    GridFunction E;
    std::vector<double> dE;  // per-cell increments, clipped to zero inside the base
    double base_cut = 0.0;
    bool symmetric = false;
    double scale = 1.0;
    double offset = 0.0;
    double flux_residual = 0.0;  // max |a m h^2 E' - 1| over cells past the base
    bool bounded = false;        // E stays below 1 on the modeled range

    double native(double canonical) const { return scale * canonical + offset; }
    double canonical(double native_level) const { return (native_level - offset) / scale; }
    double max_level() const { return E.values.back(); }
};

inline EvansPotential evans_potential_1d(const OperatorSpec& spec, const GridFunction& h,
                                         double base, bool allow_bounded = false) {
    detail::require_on_grid(spec, h, "evans_potential_1d");
    const auto& x = spec.grid->nodes();
    const std::size_t n = x.size();
    if (!(base >= x.front() && base < x.back()))
        throw error("invalid-parameter", "evans base must lie inside the grid");
    std::vector<double> log_f(n);  // log of E' = 1/(a m h^2)
    for (std::size_t i = 0; i < n; ++i) {
        if (!(h.values[i] > 0.0))
            throw error("invalid-parameter", "evans reference h must be positive");
        log_f[i] = -(spec.log_a[i] + spec.log_m[i] + 2.0 * std::log(h.values[i]));
    }

    EvansPotential ev;
    ev.base_cut = base;
    ev.dE.resize(n - 1);
    std::vector<double> vals(n);
    const double kLog2 = std::log(2.0);
    double acc = 0.5;
    vals[0] = acc;
    double worst_flux = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double w = x[i + 1] - x[i];
        const double log_hm =
            kLog2 + log_f[i] + log_f[i + 1] - log_add_exp(log_f[i], log_f[i + 1]);
        const double inc = w * std::exp(log_hm);
        const double frac = std::clamp((x[i + 1] - base) / w, 0.0, 1.0);
        ev.dE[i] = inc * frac;
        acc += ev.dE[i];
        vals[i + 1] = acc;
        if (frac == 1.0) {
            // discrete harmonicity: arithmetic-mean flux times the slope is 1
            const double flux =
                0.5 * (std::exp(-log_f[i]) + std::exp(-log_f[i + 1])) * (inc / w);
            worst_flux = std::max(worst_flux, std::abs(flux - 1.0));
        }
    }
    ev.flux_residual = worst_flux;
    ev.E = GridFunction{spec.grid, std::move(vals)};
    ev.bounded = ev.E.values.back() < 1.0;
    if (ev.bounded && !allow_bounded)
        throw error("divergence-too-slow",
                    "Evans potential stays below 1 on the modeled range; the transformed "
                    "operator is subcritical here");
    return ev;
}

// ---------------------------------------------------------------------------
// Cut-off family psi_{r,R} = clamp((R - E)/(R - r), 0, 1).

struct CutoffPair {
    double r = 0.0;
    double R = 0.0;
};

// psi stored on the window [i_lo, i_hi]; identically 1 left of it and 0 right
// of it (a pair reaching past the modeled range never drops to 0: `partial`).
struct CutoffFunction {
    GridPtr grid;
    CutoffPair pair;
    std::size_t i_lo = 0;
    std::size_t i_hi = 0;
    std::vector<double> values;
    double energy = 0.0;  // exact capacitor: clipped Evans span / (R - r)^2
    bool partial = false;

    double value(std::size_t i) const {
        if (i < i_lo) return 1.0;
        if (i > i_hi) return 0.0;
        return values[i - i_lo];
    }

    GridFunction to_grid_function() const {
        std::vector<double> v(grid->count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(i);
        return {grid, std::move(v)};
    }
};

namespace detail {

inline CutoffFunction build_psi_clipped(const EvansPotential& evans, const CutoffPair& pair) {
    if (!(pair.r > 0.5 && pair.R > pair.r))
        throw error("invalid-parameter", "cut-off pair needs 1/2 < r < R");
    const auto& E = evans.E.values;
    const std::size_t n = E.size();
    CutoffFunction psi;
    psi.grid = evans.E.grid;
    psi.pair = pair;
    psi.partial = pair.R > E.back();
    const auto above_r = std::upper_bound(E.begin(), E.end(), pair.r);
    const auto at_R = std::lower_bound(E.begin(), E.end(), pair.R);
    psi.i_lo = static_cast<std::size_t>(above_r - E.begin());
    psi.i_hi = at_R == E.end() ? n - 1 : static_cast<std::size_t>(at_R - E.begin());
    if (psi.i_lo <= psi.i_hi) {
        psi.values.resize(psi.i_hi - psi.i_lo + 1);
        for (std::size_t i = psi.i_lo; i <= psi.i_hi; ++i)
            psi.values[i - psi.i_lo] =
                std::clamp((pair.R - E[i]) / (pair.R - pair.r), 0.0, 1.0);
    }
    double span = 0.0;
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double lo = std::max(E[c], pair.r);
        const double hi = std::min(E[c + 1], pair.R);
        if (hi > lo) span += hi - lo;
    }
    psi.energy = span / ((pair.R - pair.r) * (pair.R - pair.r));
    return psi;
}

// transition cells of a cut-off, as an inclusive cell-index range
inline std::optional<std::pair<std::size_t, std::size_t>> grad_cell_range(
    const CutoffFunction& f) {
    const std::size_t count = f.grid->count();
    if (f.i_lo >= count) return std::nullopt;  // psi == 1 on the whole grid
    const std::size_t lo = f.i_lo > 0 ? f.i_lo - 1 : 0;
    const std::size_t hi = std::min(f.i_hi, count - 2);
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

}  // namespace detail

inline CutoffFunction build_psi(const EvansPotential& evans, const CutoffPair& pair) {
    if (pair.R > evans.max_level())
        throw error("out-of-range", "cut-off level R exceeds the modeled Evans range");
    return detail::build_psi_clipped(evans, pair);
}

// a(psi, psi) = int a (psi')^2 dmu with per-cell gradients; for cut-offs from
// build_psi this telescopes to the exact capacitor value.
inline double form_energy(const OperatorSpec& spec_mu, const GridFunction& psi) {
    detail::require_on_grid(spec_mu, psi, "form_energy");
    const auto& x = spec_mu.grid->nodes();
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < x.size(); ++c) {
        const double w = x[c + 1] - x[c];
        const double dpsi = (psi.values[c + 1] - psi.values[c]) / w;
        if (dpsi == 0.0) continue;
        const double am = 0.5 * (std::exp(spec_mu.log_a[c] + spec_mu.log_m[c]) +
                                 std::exp(spec_mu.log_a[c + 1] + spec_mu.log_m[c + 1]));
        acc += am * dpsi * dpsi * w;
    }
    return acc;
}

inline double capacity(const OperatorSpec& spec_mu, const EvansPotential& evans,
                       const CutoffPair& pair) {
    (void)spec_mu;
    return build_psi(evans, pair).energy;
}

// ---------------------------------------------------------------------------
// Schedules under (H1)-(H4).

struct SchedulePolicy {
    enum class Kind { geometric, paper_double_exponential };
    Kind kind = Kind::geometric;
    double base = 2.0;
    double spread = 1.5;

    static SchedulePolicy geometric(double base, double spread) {
        if (!(base > 1.0) || !(spread > 1.0) || !(spread < base))
            throw error("invalid-parameter", "geometric policy needs 1 < spread < base");
        return {Kind::geometric, base, spread};
    }
    static SchedulePolicy paper_double_exponential() {
        return {Kind::paper_double_exponential, std::exp(2.0), std::exp(1.0)};
    }
};

struct CutoffSequence {
    EvansPotential evans;
    std::vector<CutoffPair> pairs;         // canonical frame, index 0 holds n = 1
    std::vector<CutoffPair> pairs_native;  // as quoted by the policy
    GridFunction reference;                // the positive phi of the pair (H, phi)
    std::size_t n_first = 2;
    std::size_t n_last = 2;  // records run n_first..n_last; pairs extend one further
    bool intrinsic = false;

    CutoffFunction psi(std::size_t n) const {
        return detail::build_psi_clipped(evans, pairs.at(n - 1));
    }

    // A_n = supp(psi_{n+1} (1 - psi_{n-1})): nodes with r_{n-1} < E < R_{n+1}
    std::pair<std::size_t, std::size_t> annulus(std::size_t n) const {
        const auto& E = evans.E.values;
        const double lo = pairs.at(n - 2).r;
        const double hi = pairs.at(n).R;
        const auto first = std::upper_bound(E.begin(), E.end(), lo);
        const auto last = std::lower_bound(E.begin(), E.end(), hi);
        if (first == E.end() || first >= last)
            throw error("empty-window", "annulus holds no grid nodes");
        return {static_cast<std::size_t>(first - E.begin()),
                static_cast<std::size_t>(last - E.begin()) - 1};
    }
};

// (H1)-(H4) on explicit native-frame pairs; reports every violated hypothesis
// at its first offending index.
inline void check_hypotheses(const EvansPotential& evans,
                             const std::vector<CutoffPair>& native_pairs) {
    std::vector<std::string> bad;
    bool h1 = false, h2 = false, h3 = false, h4 = false;
    for (std::size_t k = 0; k < native_pairs.size(); ++k) {
        const auto& p = native_pairs[k];
        const std::string n = std::to_string(k + 1);
        if (!h2 && !(p.R > p.r)) {
            h2 = true;
            bad.push_back("(H2) fails at n=" + n + ": R_n <= r_n");
        }
        if (!h1 && k > 0 && !(p.r > native_pairs[k - 1].R)) {
            h1 = true;
            bad.push_back("(H1) fails at n=" + n + ": r_n <= R_{n-1}");
        }
        if (!h3 && p.R > p.r && 1.0 / (p.R - p.r) > 2.0 / p.R) {
            h3 = true;
            bad.push_back("(H3) fails at n=" + n + ": 1/(R_n - r_n) > 2/R_n");
        }
        if (!h4 && p.R > p.r) {
            const double cap = detail::build_psi_clipped(
                                   evans, {evans.canonical(p.r), evans.canonical(p.R)})
                                   .energy;
            if (!(cap < 1.0 / static_cast<double>(k + 1))) {
                h4 = true;
                bad.push_back("(H4) fails at n=" + n + ": form energy >= 1/n");
            }
        }
    }
    if (!bad.empty()) {
        std::string msg = bad.front();
        for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
        throw error("hypothesis-violated", msg);
    }
}

inline CutoffSequence generate_schedule(const EvansPotential& evans,
                                        const OperatorSpec& spec_mu, std::size_t n_max,
                                        const SchedulePolicy& policy,
                                        std::optional<GridFunction> reference = std::nullopt) {
    (void)spec_mu;
    if (n_max < 2) throw error("invalid-parameter", "schedules need n_max >= 2");
    const double grow = policy.kind == SchedulePolicy::Kind::geometric
                            ? policy.base / policy.spread
                            : std::exp(1.0);
    auto policy_r = [&](std::size_t n) {
        return policy.kind == SchedulePolicy::Kind::geometric
                   ? std::pow(policy.base, static_cast<double>(n))
                   : std::exp(2.0 * static_cast<double>(n));
    };
    const double max_native = evans.native(evans.max_level());

    CutoffSequence seq;
    seq.evans = evans;
    seq.n_last = n_max;
    double prev_R = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= n_max + 1; ++n) {
        double r = std::max(policy_r(n), prev_R * grow);
        if (!(r > prev_R)) r = prev_R * grow;
        double R = policy.spread * r;
        if (n <= n_max) {
            if (1.0 / (R - r) > 2.0 / R) R *= 2.0;  // (H3): one doubling reaches R >= 2r
            auto cap = [&] {
                return detail::build_psi_clipped(
                           evans, {evans.canonical(r), evans.canonical(R)})
                    .energy;
            };
            auto in_range = [&] { return R <= max_native; };
            if (!in_range())
                throw error("range-exhausted",
                            "modeled range hosts only " + std::to_string(n - 1) +
                                " cut-off pairs");
            while (!(cap() < 1.0 / static_cast<double>(n))) {  // (H4)
                R *= 2.0;
                if (!in_range())
                    throw error("range-exhausted",
                                "modeled range hosts only " + std::to_string(n - 1) +
                                    " cut-off pairs while enforcing (H4)");
            }
        }
        seq.pairs_native.push_back({r, R});
        seq.pairs.push_back({evans.canonical(r), evans.canonical(R)});
        prev_R = R;
    }
    seq.reference = reference ? std::move(*reference)
                              : make_constant(evans.E.grid, 1.0);
    return seq;
}

// ---------------------------------------------------------------------------
// Weak Hardy constant: largest generalized eigenvalue of (diag(weight), H_Q)
// by power iteration on the factored Q-norm operator.

namespace detail {

struct WeakHardySolver {
    DiscreteOperator op;
    LdlFactors factors;
    double shift;

    explicit WeakHardySolver(const OperatorSpec& spec)
        : op(form_matrix(spec)), shift(1.0 + spec.c) {
        if (sturm_count(op, -shift) != 0)
            throw error("not-positive-definite", "Q-norm operator is not positive definite");
        factors = ldl_factor(op, shift);
    }

    double constant(const GridFunction& weight) const {
        const std::size_t n = op.size();
        std::vector<double> y(n, 0.0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (weight.values[op.i0 + i] < 0.0)
                throw error("invalid-parameter", "hardy weight must be nonnegative");
            if (weight.values[op.i0 + i] > 0.0) {
                y[i] = 1.0;
                any = true;
            }
        }
        if (!any) return 0.0;
        double lam = 0.0;
        for (int it = 0; it < 200; ++it) {
            double nrm = 0.0;
            for (double v : y) nrm += v * v;
            nrm = std::sqrt(nrm);
            for (double& v : y) v /= nrm;
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                num += weight.values[op.i0 + i] * y[i] * y[i];
            auto ty = tridiag_matvec(op, y);
            double den = 0.0;
            for (std::size_t i = 0; i < n; ++i) den += (ty[i] + shift * y[i]) * y[i];
            const double next = num / den;
            const bool done = it > 0 && std::abs(next - lam) <= 1e-6 * std::abs(next);
            lam = next;
            if (done) break;
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = weight.values[op.i0 + i] * y[i];
            y = ldl_solve(factors, z);
        }
        return lam;
    }
};

}  // namespace detail

inline double weak_hardy_constant(const OperatorSpec& spec, const GridFunction& weight) {
    detail::require_on_grid(spec, weight, "weak_hardy_constant");
    return detail::WeakHardySolver(spec).constant(weight);
}

// ---------------------------------------------------------------------------
// Admissibility: nesting, plateau, and gradient-separation structure of the
// cut-off family, plus bounded weak Hardy constants.

struct AdmissibilityReport {
    bool structure_ok = true;
    std::string violation;
    std::vector<double> hardy_constants;
    bool hardy_bounded = true;
    bool pass = false;
};

inline AdmissibilityReport check_admissibility(const CutoffSequence& seq,
                                               const OperatorSpec& spec) {
    AdmissibilityReport rep;
    const std::size_t count = seq.evans.E.grid->count();
    auto fail = [&rep](const std::string& what) {
        if (rep.structure_ok) {
            rep.structure_ok = false;
            rep.violation = what;
        }
    };

    for (std::size_t n = seq.n_first; n <= seq.n_last && rep.structure_ok; ++n) {
        const auto prev = seq.psi(n - 1);
        const auto cur = seq.psi(n);
        const auto next = seq.psi(n + 1);
        const std::size_t w_lo = std::min({prev.i_lo, cur.i_lo, next.i_lo});
        const std::size_t w_hi = std::min(count - 1, std::max({prev.i_hi, cur.i_hi, next.i_hi}));
        for (std::size_t i = w_lo; i <= w_hi; ++i) {
            const double a = prev.value(i), b = cur.value(i), c = next.value(i);
            if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0 && c >= 0.0 && c <= 1.0)) {
                fail("0 <= psi <= 1 fails at n=" + std::to_string(n));
                break;
            }
            if (b > 0.0 && c != 1.0) {
                fail("nesting: psi_{n+1} != 1 on supp psi_n at n=" +
                     std::to_string(n));
                break;
            }
        }
        const auto g_prev = detail::grad_cell_range(prev);
        const auto g_cur = detail::grad_cell_range(cur);
        const auto g_next = detail::grad_cell_range(next);
        if (rep.structure_ok && g_prev && g_next &&
            !(g_next->first > g_prev->second || g_prev->first > g_next->second))
            fail("gradient-separation: transition zones of psi_{n-1}, psi_{n+1} overlap at n=" +
                 std::to_string(n));
        if (rep.structure_ok && g_cur) {
            for (std::size_t c = g_cur->first; c <= g_cur->second; ++c) {
                if (next.value(c) * (1.0 - prev.value(c)) != 1.0 ||
                    next.value(c + 1) * (1.0 - prev.value(c + 1)) != 1.0) {
                    fail("plateau: psi_{n+1}(1 - psi_{n-1}) != 1 on supp grad psi_n "
                         "at n=" + std::to_string(n));
                    break;
                }
            }
        }
    }

    {
        detail::WeakHardySolver solver(spec);
        const auto& x = spec.grid->nodes();
        for (std::size_t n = seq.n_first; n <= seq.n_last; ++n) {
            const auto cur = seq.psi(n);
            std::vector<double> w(count, 0.0);
            if (const auto g = detail::grad_cell_range(cur)) {
                for (std::size_t i = g->first; i <= g->second + 1; ++i) {
                    double g2 = 0.0;
                    int parts = 0;
                    if (i > g->first) {
                        const double s =
                            (cur.value(i) - cur.value(i - 1)) / (x[i] - x[i - 1]);
                        g2 += s * s;
                        ++parts;
                    }
                    if (i <= g->second) {
                        const double s =
                            (cur.value(i + 1) - cur.value(i)) / (x[i + 1] - x[i]);
                        g2 += s * s;
                        ++parts;
                    }
                    if (parts > 0) w[i] = std::exp(spec.log_a[i]) * g2 / parts;
                }
            }
            rep.hardy_constants.push_back(
                solver.constant(GridFunction{spec.grid, std::move(w)}));
        }
    }
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double c : rep.hardy_constants) {
        mx = std::max(mx, c);
        mn = std::min(mn, c);
    }
    rep.hardy_bounded = rep.hardy_constants.empty() || (mx == 0.0 && mn == 0.0) ||
                        (mn > 0.0 && mx / mn <= 10.0);
    rep.pass = rep.structure_ok && rep.hardy_bounded;
    return rep;
}

// ---------------------------------------------------------------------------
// Universal Hardy inequality in the transformed measure.

struct UniversalHardyReport {
    std::vector<double> ratios;
    bool pass = true;
};

inline UniversalHardyReport universal_hardy_check(const OperatorSpec& spec_mu,
                                                  const EvansPotential& evans,
                                                  const std::vector<GridFunction>& tests) {
    const auto& x = spec_mu.grid->nodes();
    const auto& E = evans.E.values;
    UniversalHardyReport rep;
    for (const auto& w : tests) {
        detail::require_on_grid(spec_mu, w, "universal_hardy_check");
        for (std::size_t i = 0; i < x.size(); ++i)
            if (w.values[i] != 0.0 && E[i] <= 0.5 + 1e-12)
                throw error("support-violation",
                            "hardy test function touches the base region");
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t c = 0; c + 1 < x.size(); ++c) {
            const double width = x[c + 1] - x[c];
            const double slope = evans.dE[c] / width;
            const double gw = (w.values[c + 1] - w.values[c]) / width;
            for (std::size_t i : {c, c + 1}) {
                const double am = std::exp(spec_mu.log_a[i] + spec_mu.log_m[i]);
                lhs += 0.5 * width * w.values[i] * w.values[i] * am * slope * slope /
                       (4.0 * E[i] * E[i]);
                rhs += 0.5 * width * am * gw * gw;
            }
        }
        if (rhs == 0.0)
            throw error("invalid-parameter", "hardy test function has no gradient");
        rep.ratios.push_back(lhs / rhs);
        if (!(lhs / rhs <= 1.0 + 1e-3)) rep.pass = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Criticality via capacities along an exhausting list of outer levels.

enum class CriticalityVerdict { critical, subcritical, inconclusive };

struct CriticalityReport {
    std::vector<double> capacities;
    CriticalityVerdict verdict = CriticalityVerdict::inconclusive;
};

inline CriticalityReport criticality_test(const OperatorSpec& spec_mu,
                                          const EvansPotential& evans, double r,
                                          const std::vector<double>& R_list) {
    (void)spec_mu;
    if (R_list.size() < 2)
        throw error("invalid-parameter", "criticality needs at least two outer levels");
    const double r_c = evans.canonical(r);
    if (!(r_c >= 0.5 - 1e-12))
        throw error("invalid-parameter", "inner level lies inside the base region");
    CriticalityReport rep;
    const auto& E = evans.E.values;
    const auto& x = evans.E.grid->nodes();
    for (double Rn : R_list) {
        const double R_c = evans.canonical(Rn);
        if (!(R_c > r_c)) throw error("invalid-parameter", "outer level must exceed r");
        if (R_c > evans.max_level() * (1.0 + 1e-12))
            throw error("out-of-range", "outer level exceeds the modeled Evans range");
        double span = 0.0;
        for (std::size_t c = 0; c + 1 < x.size(); ++c) {
            const double lo = std::max(E[c], r_c);
            const double hi = std::min(E[c + 1], R_c);
            if (hi > lo) span += hi - lo;
        }
        rep.capacities.push_back(span / ((R_c - r_c) * (R_c - r_c)));
    }
    const double last = rep.capacities.back();
    const double prev = rep.capacities[rep.capacities.size() - 2];
    if (last <= 1e-3)
        rep.verdict = CriticalityVerdict::critical;
    else if ((prev - last) / last <= 0.05)
        rep.verdict = CriticalityVerdict::subcritical;
    else
        rep.verdict = CriticalityVerdict::inconclusive;
    return rep;
}

// ---------------------------------------------------------------------------
// Intrinsic metric d_A and the (n, n+b) cut-off family of the metric Shnol
// theorem; these sequences skip (H1)-(H4) by design.

inline double intrinsic_distance(const OperatorSpec& spec, double xa, double xb) {
    const auto& x = spec.grid->nodes();
    double lo = std::min(xa, xb), hi = std::max(xa, xb);
    if (lo < x.front() - 1e-12 || hi > x.back() + 1e-12)
        throw error("invalid-range", "intrinsic distance endpoints must lie on the grid");
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < x.size(); ++c) {
        const double a = std::max(x[c], lo), b = std::min(x[c + 1], hi);
        if (b <= a) continue;
        const double w = x[c + 1] - x[c];
        auto f = [&](double xx) {
            const double t = (xx - x[c]) / w;
            return std::exp(-0.5 * (spec.log_a[c] + t * (spec.log_a[c + 1] - spec.log_a[c])));
        };
        acc += (b - a) * 0.5 * (f(a) + f(b));
    }
    return acc;
}

inline CutoffSequence intrinsic_cutoffs(const OperatorSpec& spec, double p, double b,
                                        std::size_t n_max) {
    if (!(b > 0.0 && b < 1.0))
        throw error("invalid-parameter", "intrinsic cut-offs need b in (0,1)");
    const auto& x = spec.grid->nodes();
    if (!(p >= x.front() && p < x.back()))
        throw error("invalid-parameter", "intrinsic center must lie inside the grid");

    EvansPotential ev;
    ev.base_cut = p;
    ev.scale = 1.0;
    ev.offset = -0.5;
    ev.dE.resize(x.size() - 1);
    std::vector<double> vals(x.size());
    double acc = 0.5;
    vals[0] = acc;
    for (std::size_t c = 0; c + 1 < x.size(); ++c) {
        const double w = x[c + 1] - x[c];
        const double inc =
            w * 0.5 * (std::exp(-0.5 * spec.log_a[c]) + std::exp(-0.5 * spec.log_a[c + 1]));
        const double frac = std::clamp((x[c + 1] - p) / w, 0.0, 1.0);
        ev.dE[c] = inc * frac;
        acc += ev.dE[c];
        vals[c + 1] = acc;
    }
    ev.E = GridFunction{spec.grid, std::move(vals)};
    ev.bounded = ev.E.values.back() < 1.0;

    const double d_max = ev.native(ev.max_level());
    if (d_max < static_cast<double>(n_max) + b)
        throw error("range-exhausted",
                    "modeled range hosts only " +
                        std::to_string(static_cast<std::size_t>(std::max(0.0, d_max - b))) +
                        " intrinsic cut-off pairs");

    CutoffSequence seq;
    seq.evans = std::move(ev);
    seq.n_last = n_max;
    seq.intrinsic = true;
    for (std::size_t n = 1; n <= n_max + 1; ++n) {
        const double rn = static_cast<double>(n);
        seq.pairs_native.push_back({rn, rn + b});
        seq.pairs.push_back({seq.evans.canonical(rn), seq.evans.canonical(rn + b)});
    }
    seq.reference = make_constant(spec.grid, 1.0);
    return seq;
}

}  // namespace shnol
