#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "shnol/diagnostics.hpp"
#include "shnol/special.hpp"

using namespace shnol;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OperatorSpec weighted_spec(const GridPtr& grid, const std::function<double(double)>& m,
                           const std::function<double(double)>& a = {}) {
    const auto& x = grid->nodes();
    std::vector<double> lm(x.size()), la(x.size(), 0.0), V(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        lm[i] = std::log(m(x[i]));
        if (a) la[i] = std::log(a(x[i]));
    }
    return make_operator_spec_log(grid, lm, la, V);
}

struct FlatCase {
    GridPtr grid;
    OperatorSpec spec;
    CutoffSequence seq;
    EigenPair pair;
};

// -u'' with weight m = 2 on [0, x_hi]; u = cos solves it at lambda = 1 with
// zero flux at the left end, and the intrinsic distance is just x.
FlatCase flat_case(double x_hi, std::size_t cells, std::size_t n_max) {
    FlatCase c;
    c.grid = make_graded_grid(0.0, x_hi, cells);
    c.spec = weighted_spec(c.grid, [](double) { return 2.0; });
    c.seq = intrinsic_cutoffs(c.spec, 0.0, 0.5, n_max);
    c.pair = {sample(c.grid, [](double x) { return std::cos(x); }),
              sample(c.grid, [](double x) { return -std::sin(x); }), 1.0};
    return c;
}

struct BesselCase {
    GridPtr grid;
    OperatorSpec spec;
    GridFunction h;
    EvansPotential evans;
    CutoffSequence seq;
    EigenPair pair;
};

// The 4d radial weight m = 2x^3 with the harmonic reference h = x^{-2}; the
// eigen-pair shoots from Neumann data at the left edge so the boundary flux
// a m u u' vanishes there.
BesselCase bessel_case(std::size_t cells, std::size_t n_max) {
    BesselCase c;
    c.grid = make_graded_grid(1.0, 60.0, cells);
    c.spec = weighted_spec(c.grid, [](double x) { return 2.0 * x * x * x; });
    c.h = sample(c.grid, [](double x) { return 1.0 / (x * x); });
    c.evans = evans_potential_1d(c.spec, c.h, 1.0);
    c.evans.scale = 4.0;
    c.evans.offset = -1.0;  // native frame is x^2
    c.seq = generate_schedule(c.evans, c.spec, n_max, SchedulePolicy::geometric(4.0, 2.0),
                              c.h);
    auto [u, flux] = integrate_ode_sl_flux(c.spec, 1.0, {1.0, 1.0, 0.0, 5e-4}, c.grid);
    std::vector<double> du(c.grid->count());
    for (std::size_t i = 0; i < du.size(); ++i)
        du[i] = flux.values[i] * std::exp(-c.spec.log_a[i] - c.spec.log_m[i]);
    c.pair = {std::move(u), {c.grid, std::move(du)}, 1.0};
    return c;
}

double trapezoid(const GridPtr& grid, const std::function<double(std::size_t)>& f) {
    const auto& x = grid->nodes();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (f(i) + f(i + 1));
    return acc;
}

}  // namespace

TEST_CASE("shnol records collect the window diagnostics") {
    auto c = flat_case(14.0, 14000, 12);
    const auto records = build_shnol_records(c.spec, c.seq, c.pair);
    REQUIRE(records.size() == 11);

    SECTION("window bookkeeping in the native frame") {
        for (std::size_t k = 0; k < records.size(); ++k) {
            CHECK(records[k].n == k + 2);
            CHECK_THAT(records[k].r_n, WithinAbs(static_cast<double>(k + 2), 1e-12));
            CHECK_THAT(records[k].R_n, WithinAbs(static_cast<double>(k + 2) + 0.5, 1e-12));
        }
    }

    SECTION("norms and ratios against direct quadrature") {
        for (std::size_t k = 0; k < records.size(); k += 3) {
            const auto& rec = records[k];
            const auto psi = c.seq.psi(rec.n).to_grid_function();
            const auto [a_lo, a_hi] = c.seq.annulus(rec.n);

            const double norm_sq = trapezoid(c.grid, [&](std::size_t i) {
                const double w = psi.values[i] * c.pair.u.values[i];
                return 2.0 * w * w;
            });
            CHECK_THAT(rec.norm_phi_u.value(), WithinRel(std::sqrt(norm_sq), 1e-12));

            double l2_sq = 0.0;
            for (std::size_t i = a_lo; i < a_hi; ++i) {
                const double w = (*c.grid)[i + 1] - (*c.grid)[i];
                l2_sq += 0.5 * w * 2.0 *
                         (c.pair.u.values[i] * c.pair.u.values[i] +
                          c.pair.u.values[i + 1] * c.pair.u.values[i + 1]);
            }
            CHECK_THAT(rec.l2_u_An.value(), WithinRel(std::sqrt(l2_sq), 1e-12));

            double mr = 0.0;
            for (std::size_t i = a_lo; i <= a_hi; ++i)
                mr = std::max(mr, std::abs(c.pair.u.values[i]));
            CHECK(rec.max_ratio_An == mr);

            CHECK_THAT(rec.energy_a, WithinRel(form_energy(c.spec, psi), 1e-14));

            double grad = 0.0;
            for (std::size_t m : {rec.n - 1, rec.n, rec.n + 1}) {
                const auto pm = c.seq.psi(m).to_grid_function();
                for (std::size_t i = 0; i + 1 < c.grid->count(); ++i) {
                    const double w = (*c.grid)[i + 1] - (*c.grid)[i];
                    const double slope = (pm.values[i + 1] - pm.values[i]) / w;
                    if (slope == 0.0) continue;
                    const double ui = c.pair.u.values[i], uj = c.pair.u.values[i + 1];
                    grad += 0.5 * w * slope * slope * 2.0 * (ui * ui + uj * uj);
                }
            }
            CHECK_THAT(rec.grad_terms, WithinRel(grad, 1e-12));

            CHECK_THAT(std::exp(rec.log_cond_i),
                       WithinRel(mr * std::sqrt(rec.energy_a) / rec.norm_phi_u.value(),
                                 1e-12));
            CHECK_THAT(rec.cond_ii,
                       WithinRel((rec.l2_u_An.value() + std::sqrt(rec.grad_terms)) /
                                     rec.norm_phi_u.value(),
                                 1e-12));

            std::vector<double> wv(c.grid->count());
            for (std::size_t i = 0; i < wv.size(); ++i)
                wv[i] = psi.values[i] * c.pair.u.values[i];
            CHECK_THAT(rec.residual,
                       WithinRel(weyl_residual_dual_norm(c.spec, {c.grid, std::move(wv)},
                                                         1.0),
                                 1e-13));
        }
    }

    SECTION("the necessary-condition ratio never exceeds cond_i squared") {
        for (const auto& rec : records)
            CHECK(rec.log_gen_weyl <= 2.0 * rec.log_cond_i + 1e-12);
    }

    SECTION("scaling u leaves every ratio invariant") {
        for (double alpha : {3.7, -2.0}) {
            EigenPair scaled = c.pair;
            for (double& v : scaled.u.values) v *= alpha;
            for (double& v : scaled.du.values) v *= alpha;
            const auto r2 = build_shnol_records(c.spec, c.seq, scaled);
            for (std::size_t k = 0; k < records.size(); ++k) {
                CHECK_THAT(r2[k].cond_i, WithinRel(records[k].cond_i, 1e-12));
                CHECK_THAT(r2[k].cond_ii, WithinRel(records[k].cond_ii, 1e-12));
                CHECK_THAT(r2[k].gen_weyl, WithinRel(records[k].gen_weyl, 1e-12));
                CHECK_THAT(r2[k].residual, WithinRel(records[k].residual, 1e-12));
                CHECK_THAT(r2[k].max_ratio_An,
                           WithinRel(std::abs(alpha) * records[k].max_ratio_An, 1e-12));
                CHECK_THAT(r2[k].norm_phi_u.log_magnitude,
                           WithinAbs(records[k].norm_phi_u.log_magnitude +
                                         std::log(std::abs(alpha)),
                                     1e-12));
            }
        }
    }

    SECTION("a strictly positive reference is required") {
        auto bad = c.seq;
        bad.reference.values[3] = 0.0;
        CHECK_THROWS_MATCHES(build_shnol_records(c.spec, bad, c.pair), error,
                             MessageMatches(StartsWith("invalid-parameter")));
    }

    SECTION("coarse grids leave the annuli under-resolved") {
        auto coarse = flat_case(14.0, 14, 5);
        CHECK_THROWS_MATCHES(build_shnol_records(coarse.spec, coarse.seq, coarse.pair),
                             error, MessageMatches(StartsWith("under-resolved")));
    }
}

TEST_CASE("integration by parts certifies the eigen-pair") {
    SECTION("flat oscillator") {
        auto c = flat_case(14.0, 14000, 12);
        CHECK_NOTHROW(build_shnol_records(c.spec, c.seq, c.pair));
        EigenPair wrong = c.pair;
        wrong.lambda = 2.0;
        CHECK_THROWS_MATCHES(build_shnol_records(c.spec, c.seq, wrong), error,
                             MessageMatches(StartsWith("identity-violation")));
    }

    SECTION("weighted bessel model") {
        auto c = bessel_case(40000, 4);
        CHECK_NOTHROW(build_shnol_records(c.spec, c.seq, c.pair));
        EigenPair wrong = c.pair;
        wrong.lambda = 0.0;
        CHECK_THROWS_MATCHES(build_shnol_records(c.spec, c.seq, wrong), error,
                             MessageMatches(StartsWith("identity-violation")));
    }

    SECTION("constant eigenfunction at lambda zero") {
        auto c = flat_case(14.0, 14000, 12);
        EigenPair flat1 = {make_constant(c.grid, 1.0), make_constant(c.grid, 0.0), 0.0};
        CHECK_NOTHROW(build_shnol_records(c.spec, c.seq, flat1));
    }

    SECTION("the defect ratio shrinks quadratically with the mesh") {
        auto coarse = flat_case(14.0, 7000, 12);
        auto fine = flat_case(14.0, 14000, 12);
        const auto rc = ibp_defect_ratios(coarse.spec, coarse.seq, coarse.pair);
        const auto rf = ibp_defect_ratios(fine.spec, fine.seq, fine.pair);
        REQUIRE(rc.size() == rf.size());
        for (std::size_t k = 0; k < rf.size(); ++k) {
            CHECK(rf[k] <= 1e-6);
            CHECK(rc[k] > rf[k]);
        }
    }
}

TEST_CASE("trend classification") {
    auto logs_of = [](const std::function<double(std::size_t)>& f, std::size_t len) {
        std::vector<double> out(len);
        for (std::size_t i = 0; i < len; ++i) out[i] = f(i + 2);
        return out;
    };

    SECTION("exponential decay is fitted per index") {
        const auto v = classify_trend(Condition::i,
                                      logs_of([](std::size_t n) { return -0.7 * n; }, 20), 2);
        CHECK(v.trend == Trend::decaying);
        CHECK(v.pass);
        REQUIRE(v.rate.has_value());
        CHECK_THAT(*v.rate, WithinAbs(-0.7, 1e-9));
        CHECK_THAT(v.note, ContainsSubstring("per index"));
    }

    SECTION("inverse square root decays through the power-law branch") {
        const auto v = classify_trend(
            Condition::ii, logs_of([](std::size_t n) { return -0.5 * std::log(n); }, 20), 2);
        CHECK(v.trend == Trend::decaying);
        CHECK(v.pass);
        REQUIRE(v.rate.has_value());
        CHECK_THAT(*v.rate, WithinAbs(-0.5, 0.05));
        CHECK_THAT(v.note, ContainsSubstring("power-law"));
    }

    SECTION("n^{-0.2} is too slow to call decaying") {
        const auto v = classify_trend(
            Condition::ii, logs_of([](std::size_t n) { return -0.2 * std::log(n); }, 20), 2);
        CHECK(v.trend == Trend::bounded);
        CHECK_FALSE(v.pass);
        CHECK_FALSE(v.rate.has_value());
    }

    SECTION("growth is flagged and fails") {
        const auto v = classify_trend(Condition::i,
                                      logs_of([](std::size_t n) { return 0.3 * n; }, 20), 2);
        CHECK(v.trend == Trend::growing);
        CHECK_FALSE(v.pass);
    }

    SECTION("constants stay bounded") {
        const auto v =
            classify_trend(Condition::i, logs_of([](std::size_t) { return 1.0; }, 20), 2);
        CHECK(v.trend == Trend::bounded);
        CHECK_FALSE(v.pass);
    }

    SECTION("exact zeros in the tail decide the verdict") {
        auto logs = logs_of([](std::size_t n) { return -0.1 * n; }, 20);
        logs[15] = logs[18] = kNegInf;
        const auto v = classify_trend(Condition::ii, logs, 2);
        CHECK(v.trend == Trend::decaying);
        CHECK(v.pass);
        CHECK_THAT(v.note, ContainsSubstring("zero"));
    }

    SECTION("a single record cannot be classified") {
        const auto v = classify_trend(Condition::i, {-1.0}, 2);
        CHECK(v.trend == Trend::bounded);
        CHECK_FALSE(v.pass);
        CHECK_THAT(v.note, ContainsSubstring("too few"));
    }
}

TEST_CASE("condition series wrap records in verdicts") {
    auto c = flat_case(45.0, 45000, 40);

    SECTION("condition (ii) on the flat oscillator decays like an inverse square root") {
        const auto res = condition_ii_series(c.spec, c.seq, c.pair);
        REQUIRE(res.records.size() == 39);
        CHECK(res.verdict.condition == Condition::ii);
        CHECK(res.verdict.trend == Trend::decaying);
        CHECK(res.verdict.pass);
        for (std::size_t k = 20; k < res.records.size(); ++k) {
            const double scaled =
                res.records[k].cond_ii * std::sqrt(static_cast<double>(res.records[k].n));
            CHECK(scaled > 2.5);
            CHECK(scaled < 6.5);
        }
    }

    SECTION("condition (i) with the constant reference") {
        const auto res = condition_i_series(c.spec, c.seq, c.pair, c.seq.reference);
        CHECK(res.verdict.condition == Condition::i);
        CHECK(res.verdict.trend == Trend::decaying);
        CHECK(res.verdict.pass);
        CHECK_THAT(res.verdict.note, !ContainsSubstring("reference-not-harmonic"));
    }

    SECTION("the reference must be the schedule's reference") {
        auto other = make_constant(c.grid, 1.0001);
        CHECK_THROWS_MATCHES(condition_i_series(c.spec, c.seq, c.pair, other), error,
                             MessageMatches(StartsWith("invalid-parameter")));
    }

    SECTION("condition (ii) refuses a non-constant reference") {
        auto b = bessel_case(20000, 3);
        CHECK_THROWS_MATCHES(condition_ii_series(b.spec, b.seq, b.pair), error,
                             MessageMatches(StartsWith("invalid-parameter")));
    }

    SECTION("a non-harmonic reference is reported, not rejected") {
        auto b = bessel_case(20000, 3);
        auto phi = sample(b.grid, [](double x) { return 1.0 / x; });
        auto seq2 = generate_schedule(b.evans, b.spec, 3,
                                      SchedulePolicy::geometric(4.0, 2.0), phi);
        const auto res = condition_i_series(b.spec, seq2, b.pair, phi);
        CHECK_THAT(res.verdict.note, ContainsSubstring("reference-not-harmonic"));
    }

    SECTION("taking u equal to the reference pins the ratio at one") {
        auto b = bessel_case(20000, 3);
        auto dh = sample(b.grid, [](double x) { return -2.0 / (x * x * x); });
        RecordOptions opts;
        opts.with_ibp = false;
        opts.with_residual = false;
        const auto recs = build_shnol_records(b.spec, b.seq, {b.h, dh, 0.0}, opts);
        for (const auto& r : recs) CHECK_THAT(r.max_ratio_An, WithinRel(1.0, 1e-12));
    }
}

TEST_CASE("generalized weyl ratios") {
    SECTION("they match the records and decrease on the bessel model") {
        auto b = bessel_case(40000, 4);
        const auto ratios = gen_weyl_ratio(b.spec, b.seq, b.pair);
        const auto recs = build_shnol_records(b.spec, b.seq, b.pair);
        REQUIRE(ratios.size() == recs.size());
        for (std::size_t k = 0; k < ratios.size(); ++k)
            CHECK(ratios[k] == recs[k].gen_weyl);
        for (std::size_t k = 0; k + 1 < ratios.size(); ++k)
            CHECK(ratios[k] > ratios[k + 1]);
    }

    SECTION("for u = 1 the ratio is the rayleigh quotient of psi_n") {
        auto c = flat_case(14.0, 14000, 12);
        EigenPair flat1 = {make_constant(c.grid, 1.0), make_constant(c.grid, 0.0), 0.0};
        const auto ratios = gen_weyl_ratio(c.spec, c.seq, flat1);
        for (std::size_t k = 0; k < ratios.size(); ++k) {
            const auto psi = c.seq.psi(k + 2).to_grid_function();
            const double norm_sq = trapezoid(
                c.grid, [&](std::size_t i) { return 2.0 * psi.values[i] * psi.values[i]; });
            CHECK_THAT(ratios[k], WithinRel(form_energy(c.spec, psi) / norm_sq, 1e-12));
        }
    }
}

TEST_CASE("caccioppoli checks") {
    auto c = flat_case(14.0, 14000, 12);
    auto v = sample(c.grid, [](double x) { return std::exp(-(x - 7.0) * (x - 7.0) / 8.0); });

    SECTION("pointwise constants are finite, nonnegative, and u-scale-free") {
        const auto rep = caccioppoli_pointwise_check(c.spec, c.seq, c.pair, {v});
        REQUIRE(rep.values.size() == 11);
        for (double ce : rep.values) {
            CHECK(ce >= 0.0);
            CHECK(std::isfinite(ce));
        }
        EigenPair scaled = c.pair;
        for (double& t : scaled.u.values) t *= 5.0;
        for (double& t : scaled.du.values) t *= 5.0;
        const auto rep2 = caccioppoli_pointwise_check(c.spec, c.seq, scaled, {v});
        for (std::size_t k = 0; k < rep.values.size(); ++k)
            CHECK_THAT(rep2.values[k], WithinRel(rep.values[k], 1e-12));
    }

    SECTION("test functions are normalized to unit q-norm internally") {
        auto v3 = v;
        for (double& t : v3.values) t *= 3.0;
        const auto rep = caccioppoli_pointwise_check(c.spec, c.seq, c.pair, {v});
        const auto rep2 = caccioppoli_pointwise_check(c.spec, c.seq, c.pair, {v3});
        for (std::size_t k = 0; k < rep.values.size(); ++k)
            CHECK_THAT(rep2.values[k], WithinRel(rep.values[k], 1e-12));
    }

    SECTION("a constant eigenfunction has no gradient to bound") {
        EigenPair flat1 = {make_constant(c.grid, 4.0), make_constant(c.grid, 0.0), 0.0};
        const auto rep = caccioppoli_pointwise_check(c.spec, c.seq, flat1, {v});
        for (double ce : rep.values) CHECK(ce == 0.0);
        const auto l2 = caccioppoli_l2_check(c.spec, c.seq, flat1);
        for (double r : l2.values) CHECK(r == 0.0);
    }

    SECTION("a vanishing test function is rejected") {
        CHECK_THROWS_MATCHES(
            caccioppoli_pointwise_check(c.spec, c.seq, c.pair, {make_constant(c.grid, 0.0)}),
            error, MessageMatches(StartsWith("invalid-parameter")));
    }

    SECTION("the l2 variant scales linearly in u") {
        const auto rep = caccioppoli_l2_check(c.spec, c.seq, c.pair);
        EigenPair scaled = c.pair;
        for (double& t : scaled.u.values) t *= 5.0;
        for (double& t : scaled.du.values) t *= 5.0;
        const auto rep2 = caccioppoli_l2_check(c.spec, c.seq, scaled);
        REQUIRE(rep.values.size() == rep2.values.size());
        for (std::size_t k = 0; k < rep.values.size(); ++k) {
            CHECK(rep.values[k] > 0.0);
            CHECK_THAT(rep2.values[k], WithinRel(5.0 * rep.values[k], 1e-12));
        }
    }
}

TEST_CASE("harnack equivalence") {
    SECTION("the constant eigenfunction has unit ratios and co-occurring trends") {
        auto c = flat_case(45.0, 45000, 40);
        EigenPair flat1 = {make_constant(c.grid, 1.0), make_constant(c.grid, 0.0), 0.0};
        const auto rep = harnack_equivalence(c.spec, c.seq, flat1);
        REQUIRE(rep.harnack.size() == 39);
        for (double h : rep.harnack) CHECK(h == 1.0);
        CHECK(rep.verdict.condition == Condition::harnack_equivalence);
        CHECK(rep.verdict.pass);
        CHECK_THAT(rep.verdict.note, ContainsSubstring("co-occur"));
    }

    SECTION("sign changes make the verdict inapplicable") {
        auto c = flat_case(14.0, 14000, 12);
        const auto rep = harnack_equivalence(c.spec, c.seq, c.pair);
        CHECK_FALSE(rep.verdict.pass);
        CHECK_THAT(rep.verdict.note, ContainsSubstring("inapplicable"));
    }
}

TEST_CASE("subexponential diagnostic") {
    auto series = [](const std::function<double(std::size_t)>& f, std::size_t len) {
        std::vector<double> out(len);
        for (std::size_t i = 0; i < len; ++i) out[i] = f(i + 1);
        return out;
    };

    SECTION("rho is the tail maximum of log J(n) / n with 1-based n") {
        const auto rep = subexponential_diagnostic(
            series([](std::size_t n) { return std::exp(static_cast<double>(n)); }, 64));
        CHECK_THAT(rep.rho, WithinRel(1.0, 1e-12));
        CHECK_FALSE(rep.subexponential);
        CHECK_THAT(rep.min_tail_ratio, WithinRel(std::exp(4.0), 1e-9));
    }

    SECTION("stretched-exponential growth passes on a long series") {
        const auto rep = subexponential_diagnostic(series(
            [](std::size_t n) { return std::exp(std::sqrt(static_cast<double>(n))); }, 1000));
        CHECK(rep.subexponential);
        CHECK(rep.min_tail_ratio > 1.0);
        CHECK(rep.min_tail_ratio < 1.2);
    }

    SECTION("polynomial growth passes") {
        const auto rep = subexponential_diagnostic(
            series([](std::size_t n) { return static_cast<double>(n * n); }, 1000));
        CHECK(rep.subexponential);
    }

    SECTION("decay passes with a small tail ratio") {
        const auto rep = subexponential_diagnostic(series(
            [](std::size_t n) { return std::exp(-0.5 * static_cast<double>(n)); }, 64));
        CHECK(rep.subexponential);
        CHECK_THAT(rep.min_tail_ratio, WithinRel(std::exp(-2.0), 1e-9));
    }

    SECTION("short or degenerate series are rejected") {
        CHECK_THROWS_MATCHES(
            subexponential_diagnostic(series([](std::size_t) { return 1.0; }, 7)), error,
            MessageMatches(StartsWith("too-short")));
        auto bad = series([](std::size_t) { return 1.0; }, 12);
        bad[5] = 0.0;
        CHECK_THROWS_MATCHES(subexponential_diagnostic(bad), error,
                             MessageMatches(StartsWith("invalid-parameter")));
        bad[5] = INFINITY;
        CHECK_THROWS_MATCHES(subexponential_diagnostic(bad), error,
                             MessageMatches(StartsWith("invalid-parameter")));
    }
}

TEST_CASE("re-anchoring the evans frame changes only the native columns") {
    auto b = bessel_case(20000, 3);
    const auto before = build_shnol_records(b.spec, b.seq, b.pair);

    auto seq2 = b.seq;
    seq2.evans.scale = 10.0;
    seq2.evans.offset = -2.9;
    for (std::size_t k = 0; k < seq2.pairs.size(); ++k)
        seq2.pairs_native[k] = {seq2.evans.native(seq2.pairs[k].r),
                                seq2.evans.native(seq2.pairs[k].R)};
    const auto after = build_shnol_records(b.spec, seq2, b.pair);

    REQUIRE(before.size() == after.size());
    for (std::size_t k = 0; k < before.size(); ++k) {
        CHECK(after[k].energy_a == before[k].energy_a);
        CHECK(after[k].cond_i == before[k].cond_i);
        CHECK(after[k].cond_ii == before[k].cond_ii);
        CHECK(after[k].gen_weyl == before[k].gen_weyl);
        CHECK(after[k].residual == before[k].residual);
        CHECK(after[k].norm_phi_u.log_magnitude == before[k].norm_phi_u.log_magnitude);
        CHECK(after[k].r_n != before[k].r_n);
    }
}
