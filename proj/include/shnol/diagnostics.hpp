#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "shnol/cutoff.hpp"
#include "shnol/operator.hpp"

namespace shnol {

// ---------------------------------------------------------------------------
// Verdicts and per-window records.

enum class Condition { i, ii, gen_weyl_necessary, harnack_equivalence };
enum class Trend { decaying, bounded, growing };

struct Verdict {
    Condition condition = Condition::i;
    Trend trend = Trend::bounded;
    std::optional<double> rate;  // set only when trend == decaying
    bool pass = false;
    std::string note;
};

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::i: return "i";
        case Condition::ii: return "ii";
        case Condition::gen_weyl_necessary: return "gen-weyl-necessary";
        case Condition::harnack_equivalence: return "harnack-equivalence";
    }
    return "?";
}

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::decaying: return "decaying";
        case Trend::bounded: return "bounded";
        case Trend::growing: return "growing";
    }
    return "?";
}

// One row per window index n. Norms that can overflow a double are carried in
// log form; the plain ratio columns additionally keep their natural logs so
// trends can be fitted after the linear value underflows to zero.
struct ShnolRecord {
    std::size_t n = 0;
    double r_n = 0.0;
    double R_n = 0.0;         // native-frame window pair
    double energy_a = 0.0;    // a(psi_n, psi_n) in the mu measure, exact capacitor
    LogQuantity norm_phi_u;   // ||psi_n u||_{2,m}
    double max_ratio_An = 0.0;
    LogQuantity l2_u_An;      // ||u||_{L2(A_n, m)}
    double grad_terms = 0.0;  // int |u|^2 sum_k a |psi_k'|^2 dm, k in {n-1,n,n+1}
    double cond_i = 0.0;
    double cond_ii = 0.0;
    double gen_weyl = 0.0;
    double residual = 0.0;
    double log_cond_i = kNegInf;
    double log_cond_ii = kNegInf;
    double log_gen_weyl = kNegInf;
};

// Eigenfunction sample with its nodal derivative (from the shooting flux or an
// analytic formula) and the spectral parameter it solves for.
struct EigenPair {
    GridFunction u;
    GridFunction du;
    double lambda = 0.0;
};

struct RecordOptions {
    bool with_ibp = true;
    bool with_residual = true;
};

namespace detail {

struct LsqFit {
    double slope = 0.0;
    bool ok = false;
};

inline LsqFit lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 2) return {};
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return {};
    return {(n * sxy - sx * sy) / den, true};
}

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace detail

// Log-linear fit of a nonnegative ratio series over the tail half of the
// indices. `logs` holds natural logs (kNegInf marks exact zeros), `n_first`
// the index of the first record.
inline Verdict classify_trend(Condition cond, const std::vector<double>& logs,
                              std::size_t n_first) {
    Verdict v;
    v.condition = cond;
    if (logs.size() < 2) {
        v.note = "too few records to fit a trend";
        return v;
    }
    const std::size_t start = std::min(logs.size() / 2, logs.size() - 2);
    std::vector<double> ns, lns, ys;
    bool tail_zero = false;
    for (std::size_t i = start; i < logs.size(); ++i) {
        if (logs[i] == kNegInf) {
            tail_zero = true;
            continue;
        }
        const double nn = static_cast<double>(n_first + i);
        ns.push_back(nn);
        lns.push_back(std::log(nn));
        ys.push_back(logs[i]);
    }
    if (tail_zero) {
        v.trend = Trend::decaying;
        v.pass = true;
        const auto fit = detail::lsq_slope(ns, ys);
        if (fit.ok) v.rate = fit.slope;
        v.note = "ratio reaches exact zero on the tail";
        return v;
    }
    const auto fit_n = detail::lsq_slope(ns, ys);
    const auto fit_ln = detail::lsq_slope(lns, ys);
    const double first = logs[start];
    const double last = logs.back();
    if (fit_n.ok && fit_n.slope < -0.1) {
        v.trend = Trend::decaying;
        v.rate = fit_n.slope;
        v.pass = true;
        v.note = "log-linear rate " + detail::short_num(fit_n.slope) + " per index";
    } else if (fit_ln.ok && fit_ln.slope <= -0.25 && last < first) {
        v.trend = Trend::decaying;
        v.rate = fit_ln.slope;
        v.pass = true;
        v.note = "power-law decay, exponent " + detail::short_num(fit_ln.slope) + " in n";
    } else if (fit_n.ok && fit_n.slope > 0.1 && last > first) {
        v.trend = Trend::growing;
        v.note = "log-linear rate +" + detail::short_num(fit_n.slope) + " per index";
    } else {
        v.trend = Trend::bounded;
        v.note = "no decay detected over the tail half";
    }
    return v;
}

namespace detail {

// ||psi u||_{2,m} over [0, hi], accumulated in log space.
inline LogQuantity windowed_norm(const OperatorSpec& spec, const GridFunction& u,
                                 const CutoffFunction& psi, std::size_t hi) {
    const auto& x = spec.grid->nodes();
    std::vector<LogQuantity> f(hi + 1);
    std::vector<double> dx(hi);
    for (std::size_t i = 0; i <= hi; ++i) {
        const double w = psi.value(i) * u.values[i];
        f[i] = w == 0.0
                   ? LogQuantity{}
                   : LogQuantity::from_log(1, 2.0 * std::log(std::abs(w)) + spec.log_m[i]);
        if (i < hi) dx[i] = x[i + 1] - x[i];
    }
    return lq_sqrt(integrate_log(f, dx));
}

// int |u|^2 a |psi'|^2 dm over the transition cells of one cut-off.
inline double window_grad(const OperatorSpec& spec, const GridFunction& u,
                          const CutoffFunction& psi) {
    const auto cells = grad_cell_range(psi);
    if (!cells) return 0.0;
    const auto& x = spec.grid->nodes();
    double acc = 0.0;
    for (std::size_t c = cells->first; c <= cells->second; ++c) {
        const double w = x[c + 1] - x[c];
        const double slope = (psi.value(c + 1) - psi.value(c)) / w;
        if (slope == 0.0) continue;
        double ends = 0.0;
        for (std::size_t i : {c, c + 1}) {
            if (u.values[i] == 0.0) continue;
            ends += std::exp(2.0 * std::log(std::abs(u.values[i])) + spec.log_a[i] +
                             spec.log_m[i]);
        }
        acc += 0.5 * w * slope * slope * ends;
    }
    return acc;
}

// |Q(psi u) - lambda ||psi u||^2 - int |u|^2 a psi'^2 dm| / max(|terms|),
// every integral on the same trapezoid cells with the cell-consistent
// gradient w' = psi' u + psi u'.
inline double ibp_defect_ratio(const OperatorSpec& spec, const EigenPair& pair,
                               const CutoffFunction& psi, std::size_t hi, double log_norm,
                               double gen_weyl_num) {
    const auto& x = spec.grid->nodes();
    const auto& uv = pair.u.values;
    const auto& duv = pair.du.values;
    double q_grad_log = kNegInf;
    const std::size_t cell_hi = std::min(hi, x.size() - 2);
    for (std::size_t c = 0; c <= cell_hi; ++c) {
        const double w = x[c + 1] - x[c];
        const double gpsi = (psi.value(c + 1) - psi.value(c)) / w;
        for (std::size_t i : {c, c + 1}) {
            const double dw = gpsi * uv[i] + psi.value(i) * duv[i];
            if (dw == 0.0) continue;
            q_grad_log = log_add_exp(q_grad_log, std::log(0.5 * w) + spec.log_a[i] +
                                                     spec.log_m[i] +
                                                     2.0 * std::log(std::abs(dw)));
        }
    }
    LogQuantity q_pot;
    {
        std::vector<LogQuantity> f(hi + 1);
        std::vector<double> dx(hi);
        for (std::size_t i = 0; i <= hi; ++i) {
            const double vw = spec.vw(i);
            const double wval = psi.value(i) * uv[i];
            if (vw != 0.0 && wval != 0.0)
                f[i] = LogQuantity::from_log(
                    vw > 0.0 ? 1 : -1,
                    std::log(std::abs(vw)) + 2.0 * std::log(std::abs(wval)) + spec.log_m[i]);
            if (i < hi) dx[i] = x[i + 1] - x[i];
        }
        q_pot = integrate_log(f, dx);
    }
    const LogQuantity q_term = lq_add(LogQuantity::from_log(1, q_grad_log), q_pot);
    const LogQuantity lam_term =
        pair.lambda == 0.0
            ? LogQuantity{}
            : LogQuantity::from_log(pair.lambda > 0.0 ? 1 : -1,
                                    std::log(std::abs(pair.lambda)) + 2.0 * log_norm);
    const LogQuantity g_term = LogQuantity::from_value(gen_weyl_num);
    LogQuantity defect = lq_add(q_term, LogQuantity{-lam_term.sign, lam_term.log_magnitude});
    defect = lq_add(defect, LogQuantity{-g_term.sign, g_term.log_magnitude});
    const double max_log =
        std::max({q_term.log_magnitude, lam_term.log_magnitude, g_term.log_magnitude});
    if (defect.sign == 0 || max_log == kNegInf) return 0.0;
    return std::exp(defect.log_magnitude - max_log);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The record builder: every window diagnostic for n in [n_first, n_last].

inline std::vector<ShnolRecord> build_shnol_records(const OperatorSpec& spec,
                                                    const CutoffSequence& seq,
                                                    const EigenPair& pair,
                                                    const RecordOptions& opts = {}) {
    detail::require_on_grid(spec, pair.u, "build_shnol_records");
    detail::require_on_grid(spec, pair.du, "build_shnol_records");
    detail::require_on_grid(spec, seq.reference, "build_shnol_records");
    if (!same_grid(seq.evans.E, pair.u))
        throw error("grid-mismatch", "cut-off sequence lives on a different grid");
    for (double p : seq.reference.values)
        if (!(p > 0.0))
            throw error("invalid-parameter", "reference must be strictly positive");

    const auto& x = spec.grid->nodes();
    const std::size_t count = x.size();
    const auto& uv = pair.u.values;
    const double lambda = pair.lambda;

    std::optional<detail::WeylAssembler> weyl;
    if (opts.with_residual) weyl.emplace(spec);

    std::vector<ShnolRecord> records;
    for (std::size_t n = seq.n_first; n <= seq.n_last; ++n) {
        const auto prev = seq.psi(n - 1);
        const auto cur = seq.psi(n);
        const auto next = seq.psi(n + 1);
        const auto [a_lo, a_hi] = seq.annulus(n);
        if (a_hi - a_lo + 1 < 4)
            throw error("under-resolved",
                        "annulus A_" + std::to_string(n) + " holds fewer than 4 grid nodes");

        ShnolRecord rec;
        rec.n = n;
        rec.r_n = seq.pairs_native[n - 1].r;
        rec.R_n = seq.pairs_native[n - 1].R;
        // For an Evans schedule a(psi_n/phi, psi_n/phi) telescopes to the exact
        // level-set capacitor; an intrinsic schedule has no such identity, so
        // there the form energy is integrated directly.
        rec.energy_a = seq.intrinsic ? form_energy(spec, cur.to_grid_function())
                                     : cur.energy;

        const std::size_t hi = std::min(cur.i_hi, count - 1);
        rec.norm_phi_u = detail::windowed_norm(spec, pair.u, cur, hi);

        // ||u||_{L2(A_n, m)}
        {
            std::vector<LogQuantity> f(a_hi - a_lo + 1);
            std::vector<double> dx(a_hi - a_lo);
            for (std::size_t i = a_lo; i <= a_hi; ++i) {
                f[i - a_lo] = uv[i] == 0.0
                                  ? LogQuantity{}
                                  : LogQuantity::from_log(
                                        1, 2.0 * std::log(std::abs(uv[i])) + spec.log_m[i]);
                if (i < a_hi) dx[i - a_lo] = x[i + 1] - x[i];
            }
            rec.l2_u_An = lq_sqrt(integrate_log(f, dx));
        }

        double max_ratio = 0.0;
        for (std::size_t i = a_lo; i <= a_hi; ++i)
            max_ratio = std::max(max_ratio, std::abs(uv[i]) / seq.reference.values[i]);
        rec.max_ratio_An = max_ratio;

        // int |u|^2 a |psi_k'|^2 dm over the transition cells, k = n-1, n, n+1
        const double gen_weyl_num = detail::window_grad(spec, pair.u, cur);
        const double grad_sum = detail::window_grad(spec, pair.u, prev) + gen_weyl_num +
                                detail::window_grad(spec, pair.u, next);
        rec.grad_terms = grad_sum;

        const double log_norm = rec.norm_phi_u.sign == 0 ? kNegInf
                                                         : rec.norm_phi_u.log_magnitude;
        rec.log_gen_weyl = gen_weyl_num == 0.0
                               ? kNegInf
                               : std::log(gen_weyl_num) - 2.0 * log_norm;
        rec.gen_weyl = std::exp(rec.log_gen_weyl);
        rec.log_cond_i = max_ratio == 0.0 || rec.energy_a == 0.0
                             ? kNegInf
                             : std::log(max_ratio) + 0.5 * std::log(rec.energy_a) - log_norm;
        rec.cond_i = std::exp(rec.log_cond_i);
        {
            const double l2_log = rec.l2_u_An.sign == 0 ? kNegInf : rec.l2_u_An.log_magnitude;
            const double grad_log = grad_sum == 0.0 ? kNegInf : 0.5 * std::log(grad_sum);
            rec.log_cond_ii = log_add_exp(l2_log, grad_log) - log_norm;
            rec.cond_ii = std::exp(rec.log_cond_ii);
        }

        if (opts.with_residual) {
            std::vector<double> wv(count, 0.0);
            for (std::size_t i = 0; i <= hi; ++i) wv[i] = cur.value(i) * uv[i];
            rec.residual = (*weyl)(GridFunction{spec.grid, std::move(wv)}, lambda);
        }

        if (opts.with_ibp &&
            detail::ibp_defect_ratio(spec, pair, cur, hi, log_norm, gen_weyl_num) > 1e-6)
            throw error("identity-violation",
                        "integration-by-parts defect exceeds 1e-6 of the largest term "
                        "at n=" + std::to_string(n));

        records.push_back(std::move(rec));
    }
    return records;
}

// The raw integration-by-parts defect, relative to the largest of the three
// terms, one value per n. This is the quantity the record builder gates at
// 1e-6; surfacing it lets a scenario choose a mesh with real margin.
inline std::vector<double> ibp_defect_ratios(const OperatorSpec& spec,
                                             const CutoffSequence& seq,
                                             const EigenPair& pair) {
    detail::require_on_grid(spec, pair.u, "ibp_defect_ratios");
    detail::require_on_grid(spec, pair.du, "ibp_defect_ratios");
    const std::size_t count = spec.grid->count();
    std::vector<double> out;
    for (std::size_t n = seq.n_first; n <= seq.n_last; ++n) {
        const auto cur = seq.psi(n);
        const std::size_t hi = std::min(cur.i_hi, count - 1);
        const auto norm = detail::windowed_norm(spec, pair.u, cur, hi);
        const double log_norm = norm.sign == 0 ? kNegInf : norm.log_magnitude;
        const double gw = detail::window_grad(spec, pair.u, cur);
        out.push_back(detail::ibp_defect_ratio(spec, pair, cur, hi, log_norm, gw));
    }
    return out;
}

// ---------------------------------------------------------------------------
// The two sufficient-condition series and the generalized Weyl necessary
// condition.

struct SeriesResult {
    std::vector<ShnolRecord> records;
    Verdict verdict;
};

inline SeriesResult condition_i_series(const OperatorSpec& spec, const CutoffSequence& seq,
                                       const EigenPair& pair,
                                       const GridFunction& reference) {
    detail::require_on_grid(spec, reference, "condition_i_series");
    if (reference.values != seq.reference.values)
        throw error("invalid-parameter",
                    "condition (i) reference must match the schedule's reference");
    std::string warning;
    const double hres = harmonicity_residual(spec, reference);
    if (!(hres <= 1e-6))
        warning = "reference-not-harmonic: residual " + detail::short_num(hres) + "; ";

    SeriesResult out;
    out.records = build_shnol_records(spec, seq, pair);
    std::vector<double> logs;
    for (const auto& r : out.records) logs.push_back(r.log_cond_i);
    out.verdict = classify_trend(Condition::i, logs, seq.n_first);
    out.verdict.note = warning + out.verdict.note;
    return out;
}

inline SeriesResult condition_ii_series(const OperatorSpec& spec, const CutoffSequence& seq,
                                        const EigenPair& pair) {
    for (double p : seq.reference.values)
        if (p != 1.0)
            throw error("invalid-parameter",
                        "condition (ii) requires the constant reference 1");
    SeriesResult out;
    out.records = build_shnol_records(spec, seq, pair);
    std::vector<double> logs;
    for (const auto& r : out.records) logs.push_back(r.log_cond_ii);
    out.verdict = classify_trend(Condition::ii, logs, seq.n_first);
    return out;
}

inline std::vector<double> gen_weyl_ratio(const OperatorSpec& spec, const CutoffSequence& seq,
                                          const EigenPair& pair) {
    RecordOptions opts;
    opts.with_residual = false;  // the ratio and its IBP cross-check only
    const auto records = build_shnol_records(spec, seq, pair, opts);
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.gen_weyl);
    return out;
}

// ---------------------------------------------------------------------------
// Caccioppoli checks, carried out in the mu measure.

struct CaccioppoliReport {
    std::vector<double> values;  // one empirical constant per n
    double sup = 0.0;
};

namespace detail {

// chi = psi_{n+1} (1 - psi_{n-1}) squared against a|u'|^2, integrated over A_n
inline double caccioppoli_lhs(const OperatorSpec& spec_mu, const CutoffSequence& seq,
                              const EigenPair& pair, std::size_t n,
                              const GridFunction* v) {
    const auto prev = seq.psi(n - 1);
    const auto next = seq.psi(n + 1);
    const auto [a_lo, a_hi] = seq.annulus(n);
    const auto& x = spec_mu.grid->nodes();
    double acc = 0.0;
    for (std::size_t c = a_lo; c < a_hi; ++c) {
        const double w = x[c + 1] - x[c];
        double ends = 0.0;
        for (std::size_t i : {c, c + 1}) {
            const double chi = next.value(i) * (1.0 - prev.value(i));
            if (chi == 0.0 || pair.du.values[i] == 0.0) continue;
            const double vv = v ? v->values[i] : 1.0;
            if (vv == 0.0) continue;
            ends += chi * chi * vv * vv *
                    std::exp(spec_mu.log_a[i] + spec_mu.log_m[i] +
                             2.0 * std::log(std::abs(pair.du.values[i])));
        }
        acc += 0.5 * w * ends;
    }
    return acc;
}

}  // namespace detail

inline CaccioppoliReport caccioppoli_pointwise_check(const OperatorSpec& spec_mu,
                                                     const CutoffSequence& seq,
                                                     const EigenPair& pair,
                                                     const std::vector<GridFunction>& tests) {
    double w_inf = 0.0;
    for (double wv : spec_mu.W) w_inf = std::max(w_inf, std::abs(wv));
    const double front = 2.0 + std::sqrt(std::abs(pair.lambda) + w_inf);

    std::vector<GridFunction> normalized;
    for (const auto& v : tests) {
        detail::require_on_grid(spec_mu, v, "caccioppoli_pointwise_check");
        const double qn = q_norm(spec_mu, v);
        if (!(qn > 0.0))
            throw error("invalid-parameter", "caccioppoli test function has zero Q-norm");
        GridFunction vn = v;
        for (double& val : vn.values) val /= qn;
        normalized.push_back(std::move(vn));
    }

    CaccioppoliReport rep;
    for (std::size_t n = seq.n_first; n <= seq.n_last; ++n) {
        const auto [a_lo, a_hi] = seq.annulus(n);
        double sup_u = 0.0;
        for (std::size_t i = a_lo; i <= a_hi; ++i)
            sup_u = std::max(sup_u, std::abs(pair.u.values[i]));
        double worst = 0.0;
        for (const auto& v : normalized) {
            const double lhs = detail::caccioppoli_lhs(spec_mu, seq, pair, n, &v);
            const double denom = front * front * sup_u * sup_u;
            worst = std::max(worst, denom == 0.0 ? (lhs == 0.0 ? 0.0 : INFINITY)
                                                 : lhs / denom);
        }
        rep.values.push_back(worst);
        rep.sup = std::max(rep.sup, worst);
    }
    return rep;
}

inline CaccioppoliReport caccioppoli_l2_check(const OperatorSpec& spec_mu,
                                              const CutoffSequence& seq,
                                              const EigenPair& pair) {
    const auto& x = spec_mu.grid->nodes();
    CaccioppoliReport rep;
    for (std::size_t n = seq.n_first; n <= seq.n_last; ++n) {
        const double lhs = detail::caccioppoli_lhs(spec_mu, seq, pair, n, nullptr);

        const auto [a_lo, a_hi] = seq.annulus(n);
        double l2_sq = 0.0;
        for (std::size_t c = a_lo; c < a_hi; ++c) {
            const double w = x[c + 1] - x[c];
            double ends = 0.0;
            for (std::size_t i : {c, c + 1})
                if (pair.u.values[i] != 0.0)
                    ends += std::exp(2.0 * std::log(std::abs(pair.u.values[i])) +
                                     spec_mu.log_m[i]);
            l2_sq += 0.5 * w * ends;
        }

        double window = 0.0;
        const auto prev = seq.psi(n - 1);
        const auto next = seq.psi(n + 1);
        for (const CutoffFunction* psi_k : {&prev, &next}) {
            const auto cells = detail::grad_cell_range(*psi_k);
            if (!cells) continue;
            for (std::size_t c = cells->first; c <= cells->second; ++c) {
                const double w = x[c + 1] - x[c];
                const double slope = (psi_k->value(c + 1) - psi_k->value(c)) / w;
                if (slope == 0.0) continue;
                double ends = 0.0;
                for (std::size_t i : {c, c + 1})
                    if (pair.u.values[i] != 0.0)
                        ends += std::exp(2.0 * std::log(std::abs(pair.u.values[i])) +
                                         spec_mu.log_a[i] + spec_mu.log_m[i]);
                window += 0.5 * w * slope * slope * ends;
            }
        }

        const double rhs = std::sqrt(l2_sq) + std::sqrt(window);
        rep.values.push_back(rhs == 0.0 ? (lhs == 0.0 ? 0.0 : INFINITY) : lhs / rhs);
        rep.sup = std::max(rep.sup, rep.values.back());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Harnack equivalence.

struct HarnackReport {
    std::vector<double> harnack;    // sup/inf |u| on A_n
    std::vector<double> gen_weyl;
    std::vector<double> residuals;
    Verdict verdict;
};

inline HarnackReport harnack_equivalence(const OperatorSpec& spec, const CutoffSequence& seq,
                                         const EigenPair& pair) {
    HarnackReport rep;
    rep.verdict.condition = Condition::harnack_equivalence;

    const auto records = build_shnol_records(spec, seq, pair);
    bool vanishing = false;
    std::vector<double> log_gw, log_res;
    for (const auto& r : records) {
        const auto [a_lo, a_hi] = seq.annulus(r.n);
        double sup = 0.0, inf = INFINITY;
        for (std::size_t i = a_lo; i <= a_hi; ++i) {
            const double av = std::abs(pair.u.values[i]);
            sup = std::max(sup, av);
            inf = std::min(inf, av);
            // a sign change certifies a zero inside the cell even when no node
            // lands on it exactly
            if (av == 0.0 ||
                (i > a_lo && pair.u.values[i] * pair.u.values[i - 1] < 0.0))
                vanishing = true;
        }
        rep.harnack.push_back(inf > 0.0 ? sup / inf : INFINITY);
        rep.gen_weyl.push_back(r.gen_weyl);
        rep.residuals.push_back(r.residual);
        log_gw.push_back(r.log_gen_weyl);
        log_res.push_back(r.residual > 0.0 ? std::log(r.residual) : kNegInf);
    }

    if (vanishing) {
        rep.verdict.trend = Trend::bounded;
        rep.verdict.pass = false;
        rep.verdict.note = "vanishing-u: |u| reaches zero on an annulus; "
                           "Harnack hypothesis fails, verdict inapplicable";
        return rep;
    }

    const auto gw = classify_trend(Condition::gen_weyl_necessary, log_gw, seq.n_first);
    const auto res = classify_trend(Condition::gen_weyl_necessary, log_res, seq.n_first);
    rep.verdict.trend = gw.trend;
    rep.verdict.rate = gw.rate;
    rep.verdict.pass = (gw.trend == Trend::decaying) == (res.trend == Trend::decaying);
    rep.verdict.note = "gen_weyl " + std::string(to_string(gw.trend)) + ", residual " +
                       to_string(res.trend) +
                       (rep.verdict.pass ? "; trends co-occur" : "; trends disagree");
    return rep;
}

// ---------------------------------------------------------------------------
// Subexponential growth diagnostic.

struct SubexponentialReport {
    double rho = 0.0;             // limsup estimate of log J(n) / n over the tail
    double min_tail_ratio = 0.0;  // min over the tail of J(n+3)/J(n-1)
    bool subexponential = false;
    std::string note;
};

inline SubexponentialReport subexponential_diagnostic(const std::vector<double>& J) {
    if (J.size() < 8)
        throw error("too-short", "subexponential diagnostic needs at least 8 terms");
    for (double v : J)
        if (!(v > 0.0) || !std::isfinite(v))
            throw error("invalid-parameter", "J must be positive and finite");

    SubexponentialReport rep;
    rep.rho = kNegInf;
    const std::size_t len = J.size();
    for (std::size_t n = len / 2; n <= len; ++n)
        rep.rho = std::max(rep.rho, std::log(J[n - 1]) / static_cast<double>(n));
    rep.min_tail_ratio = INFINITY;
    for (std::size_t n = len / 2; n + 3 <= len; ++n)
        rep.min_tail_ratio = std::min(rep.min_tail_ratio, J[n + 2] / J[n - 2]);
    rep.subexponential = rep.rho <= 0.05;
    rep.note = "rho " + detail::short_num(rep.rho) + ", min tail ratio J(n+3)/J(n-1) " +
               detail::short_num(rep.min_tail_ratio);
    return rep;
}

}  // namespace shnol
