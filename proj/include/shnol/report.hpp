#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "shnol/scenario.hpp"

namespace shnol {

// ---------------------------------------------------------------------------
// ReportBundle: every pipeline run of a config (one per lambda), plus the
// relative changes under one mesh refinement when requested.

struct RefinementDelta {
    double cond_i = 0.0;
    double cond_ii = 0.0;
    double gen_weyl = 0.0;
    double residual = 0.0;
};

struct ReportBundle {
    ScenarioConfig config;
    std::vector<ShnolReport> reports;
    std::vector<std::vector<RefinementDelta>> deltas;  // per report, per record
    bool mesh_halved = false;
    bool truncated = false;  // some report holds fewer than n_max - 1 records
};

namespace detail {

// Relative change of a ratio carried in log form; exact zeros on both meshes
// count as unchanged.
inline double log_rel_change(double log_fine, double log_base) {
    if (log_fine == kNegInf && log_base == kNegInf) return 0.0;
    if (log_fine == kNegInf || log_base == kNegInf)
        return std::numeric_limits<double>::infinity();
    return std::abs(std::expm1(log_fine - log_base));
}

inline double rel_change(double fine, double base) {
    if (fine == base) return 0.0;
    if (base == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(fine - base) / std::abs(base);
}

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

inline ReportBundle run(const ScenarioConfig& cfg, bool mesh_halve = false) {
    ReportBundle bundle;
    bundle.config = cfg;
    bundle.mesh_halved = mesh_halve;

    const Scenario base = build_scenario(cfg);
    for (double lambda : cfg.lambdas) {
        bundle.reports.push_back(run_pipeline(base, lambda));
        if (bundle.reports.back().records.size() + 1 < cfg.n_max)
            bundle.truncated = true;
    }

    if (mesh_halve) {
        const Scenario fine = build_scenario(cfg, cfg.cells * 2);
        for (std::size_t k = 0; k < cfg.lambdas.size(); ++k) {
            const ShnolReport refined = run_pipeline(fine, cfg.lambdas[k]);
            const auto& a = bundle.reports[k].records;
            const auto& b = refined.records;
            if (a.size() != b.size())
                throw error("refinement-mismatch",
                            "mesh halving changed the window count");
            std::vector<RefinementDelta> d(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                d[i].cond_i = detail::log_rel_change(b[i].log_cond_i, a[i].log_cond_i);
                d[i].cond_ii = detail::log_rel_change(b[i].log_cond_ii, a[i].log_cond_ii);
                d[i].gen_weyl =
                    detail::log_rel_change(b[i].log_gen_weyl, a[i].log_gen_weyl);
                d[i].residual = detail::rel_change(b[i].residual, a[i].residual);
            }
            bundle.deltas.push_back(std::move(d));
        }
    }
    return bundle;
}

// ---------------------------------------------------------------------------
// CSV: one file per lambda. With several lambdas the path gains a
// "-lambda<value>" suffix before the extension.

namespace detail {

inline std::string with_lambda_suffix(const std::string& path, double lambda,
                                      bool multi) {
    if (!multi) return path;
    const std::size_t dot = path.rfind('.');
    const std::string suffix = "-lambda" + fmt_short(lambda);
    if (dot == std::string::npos) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("io-error", "cannot write " + path);
    return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "n,r_n,R_n,energy_a,log_norm,max_ratio,cond_i,cond_ii,gen_weyl,residual,"
    "l2_u_An,grad_terms";

inline void emit_csv(const ReportBundle& bundle, const std::string& path) {
    const bool multi = bundle.reports.size() > 1;
    for (std::size_t k = 0; k < bundle.reports.size(); ++k) {
        const auto& rep = bundle.reports[k];
        auto out = detail::open_out(
            detail::with_lambda_suffix(path, rep.lambda, multi));
        out << kCsvHeader;
        if (bundle.mesh_halved)
            out << ",delta_cond_i,delta_cond_ii,delta_gen_weyl,delta_residual";
        out << "\n";
        for (std::size_t i = 0; i < rep.records.size(); ++i) {
            const auto& r = rep.records[i];
            const double log_norm =
                r.norm_phi_u.sign == 0 ? kNegInf : r.norm_phi_u.log_magnitude;
            out << r.n << ',' << detail::fmt12(r.r_n) << ',' << detail::fmt12(r.R_n)
                << ',' << detail::fmt12(r.energy_a) << ',' << detail::fmt12(log_norm)
                << ',' << detail::fmt12(r.max_ratio_An) << ','
                << detail::fmt12(r.cond_i) << ',' << detail::fmt12(r.cond_ii) << ','
                << detail::fmt12(r.gen_weyl) << ',' << detail::fmt12(r.residual)
                << ',' << detail::fmt12(r.l2_u_An.value()) << ','
                << detail::fmt12(r.grad_terms);
            if (bundle.mesh_halved) {
                const auto& d = bundle.deltas[k][i];
                out << ',' << detail::fmt12(d.cond_i) << ',' << detail::fmt12(d.cond_ii)
                    << ',' << detail::fmt12(d.gen_weyl) << ','
                    << detail::fmt12(d.residual);
            }
            out << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// SVG: the four log-ratio series against n as labeled polylines. Plots are
// advisory; the CSV is the acceptance surface.

namespace detail {

struct SvgSeries {
    const char* id;
    const char* label;
    const char* color;
    std::vector<double> logs;
};

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

inline void emit_svg(const ReportBundle& bundle, const std::string& path) {
    const bool multi = bundle.reports.size() > 1;
    for (const auto& rep : bundle.reports) {
        auto out = detail::open_out(
            detail::with_lambda_suffix(path, rep.lambda, multi));

        std::vector<detail::SvgSeries> series = {
            {"cond_i", "log(cond_i)", "#1f77b4", {}},
            {"cond_ii", "log(cond_ii)", "#d62728", {}},
            {"gen_weyl", "log(gen_weyl)", "#2ca02c", {}},
            {"residual", "log(residual)", "#9467bd", {}},
        };
        for (const auto& r : rep.records) {
            series[0].logs.push_back(r.log_cond_i);
            series[1].logs.push_back(r.log_cond_ii);
            series[2].logs.push_back(r.log_gen_weyl);
            series[3].logs.push_back(r.residual > 0.0 ? std::log(r.residual) : kNegInf);
        }

        double y_min = std::numeric_limits<double>::infinity();
        double y_max = -std::numeric_limits<double>::infinity();
        for (const auto& s : series)
            for (double v : s.logs)
                if (v != kNegInf) {
                    y_min = std::min(y_min, v);
                    y_max = std::max(y_max, v);
                }
        if (!(y_min < y_max)) {
            y_min = (y_min == std::numeric_limits<double>::infinity()) ? -1.0 : y_min - 1.0;
            y_max = y_min + 2.0;
        }

        const double width = 800.0, height = 560.0;
        const double ml = 80.0, mr = 180.0, mt = 30.0, mb = 60.0;
        const double n_lo = static_cast<double>(rep.records.front().n);
        const double n_hi = static_cast<double>(rep.records.back().n);
        const double n_span = std::max(1.0, n_hi - n_lo);
        auto sx = [&](double n) {
            return ml + (n - n_lo) / n_span * (width - ml - mr);
        };
        auto sy = [&](double v) {
            const double clamped = v == kNegInf ? y_min : v;
            return mt + (y_max - clamped) / (y_max - y_min) * (height - mt - mb);
        };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
            << height << "\">\n";
        out << "<rect width=\"" << width << "\" height=\"" << height
            << "\" fill=\"white\"/>\n";
        // axes
        out << "<line x1=\"" << detail::fmt2(ml) << "\" y1=\"" << detail::fmt2(mt)
            << "\" x2=\"" << detail::fmt2(ml) << "\" y2=\""
            << detail::fmt2(height - mb) << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << detail::fmt2(ml) << "\" y1=\""
            << detail::fmt2(height - mb) << "\" x2=\"" << detail::fmt2(width - mr)
            << "\" y2=\"" << detail::fmt2(height - mb) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << detail::fmt2((ml + width - mr) / 2.0) << "\" y=\""
            << detail::fmt2(height - 15.0) << "\" text-anchor=\"middle\">n</text>\n";
        out << "<text x=\"20\" y=\"" << detail::fmt2((mt + height - mb) / 2.0)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
            << detail::fmt2((mt + height - mb) / 2.0) << ")\">ln value</text>\n";
        out << "<text x=\"" << detail::fmt2(ml - 8.0) << "\" y=\""
            << detail::fmt2(mt + 5.0) << "\" text-anchor=\"end\">"
            << detail::fmt2(y_max) << "</text>\n";
        out << "<text x=\"" << detail::fmt2(ml - 8.0) << "\" y=\""
            << detail::fmt2(height - mb) << "\" text-anchor=\"end\">"
            << detail::fmt2(y_min) << "</text>\n";
        out << "<text x=\"" << detail::fmt2(ml) << "\" y=\""
            << detail::fmt2(height - mb + 20.0) << "\" text-anchor=\"middle\">"
            << detail::fmt2(n_lo) << "</text>\n";
        out << "<text x=\"" << detail::fmt2(width - mr) << "\" y=\""
            << detail::fmt2(height - mb + 20.0) << "\" text-anchor=\"middle\">"
            << detail::fmt2(n_hi) << "</text>\n";

        double legend_y = mt + 20.0;
        for (const auto& s : series) {
            bool any_finite = false;
            for (double v : s.logs) any_finite = any_finite || v != kNegInf;
            if (any_finite) {
                out << "<polyline id=\"" << s.id << "\" fill=\"none\" stroke=\""
                    << s.color << "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < s.logs.size(); ++i) {
                    if (i) out << ' ';
                    out << detail::fmt2(sx(static_cast<double>(rep.records[i].n)))
                        << ',' << detail::fmt2(sy(s.logs[i]));
                }
                out << "\"/>\n";
            }
            out << "<text x=\"" << detail::fmt2(width - mr + 12.0) << "\" y=\""
                << detail::fmt2(legend_y) << "\" fill=\"" << s.color << "\">"
                << s.label << "</text>\n";
            legend_y += 22.0;
        }
        out << "</svg>\n";
    }
}

// ---------------------------------------------------------------------------
// Provenance: config echo, mesh, version, and the verdict table.

inline void write_meta(const ReportBundle& bundle, const std::string& path) {
    auto out = detail::open_out(path);
    out << "shnol " << kVersion << "\n";
    out << "scenario: " << bundle.config.name << "\n";
    out << "interval: [" << detail::fmt12(bundle.config.x_lo) << ", "
        << detail::fmt12(bundle.config.x_hi) << "]\n";
    out << "grid: " << bundle.config.cells << " cells, " << bundle.config.grading
        << " grading\n";
    out << "mesh-halved: " << (bundle.mesh_halved ? "yes" : "no") << "\n";
    out << "truncated: " << (bundle.truncated ? "yes" : "no") << "\n";
    for (const auto& rep : bundle.reports) {
        out << "lambda " << detail::fmt12(rep.lambda) << ": records "
            << rep.records.size();
        if (rep.final_annulus_clipped) out << " (final annulus clipped, trends fit without it)";
        out << ", admissibility " << (rep.admissibility.pass ? "pass" : "fail");
        out << ", condition (i) " << to_string(rep.verdict_i.trend)
            << (rep.verdict_i.pass ? " pass" : " fail");
        if (rep.verdict_ii)
            out << ", condition (ii) " << to_string(rep.verdict_ii->trend)
                << (rep.verdict_ii->pass ? " pass" : " fail");
        out << ", gen-weyl " << to_string(rep.verdict_gen_weyl.trend);
        out << ", oracle distance " << detail::fmt12(rep.oracle.distance)
            << " (resolution " << detail::fmt12(rep.oracle.resolution) << ")";
        if (rep.subexp)
            out << ", J " << (rep.subexp->subexponential ? "subexponential" : "exponential")
                << " (rho " << detail::fmt12(rep.subexp->rho) << ")";
        out << ", |u|<=C*phi with C " << detail::fmt12(rep.bp_constant);
        out << "\n";
    }
    out << "config:\n";
    for (const auto& [key, value] : bundle.config.entries)
        out << "  " << key << " = " << value << "\n";
}

}  // namespace shnol
