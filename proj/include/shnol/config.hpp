#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "shnol/error.hpp"

namespace shnol {

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Coefficient expressions: an optional scalar prefix times a registry tag,
// "2*abs_x^3" or "2pi*exp(2)". Configs stay data; there is no interpreter.

inline constexpr const char* kValidTags =
    "one, zero, const(c), abs_x^k, exp(k), sinh^k, step(x0,a,b)";

struct Expression {
    std::string text = "one";  // as written in the config
    std::string tag = "one";   // registry family: one zero const abs_x exp sinh step
    double scale = 1.0;
    std::vector<double> args;

    double operator()(double x) const {
        double v;
        if (tag == "one")
            v = 1.0;
        else if (tag == "zero")
            v = 0.0;
        else if (tag == "const")
            v = args[0];
        else if (tag == "abs_x")
            v = std::pow(std::abs(x), args[0]);
        else if (tag == "exp")
            v = std::exp(args[0] * x);
        else if (tag == "sinh")
            v = std::pow(std::sinh(x), args[0]);
        else
            v = x < args[0] ? args[1] : args[2];  // step
        return scale * v;
    }

    // log of the (positive) value; exact for exp(k), whose plain value can
    // overflow long before its log does.
    double log_value(double x) const {
        if (tag == "exp") return std::log(scale) + args[0] * x;
        if (tag == "abs_x") return std::log(scale) + args[0] * std::log(std::abs(x));
        if (tag == "sinh") return std::log(scale) + args[0] * std::log(std::sinh(x));
        return std::log((*this)(x));
    }

    // d/dx log of the value, where the tag is smooth.
    double dlog(double x) const {
        if (tag == "abs_x") return args[0] / x;
        if (tag == "exp") return args[0];
        if (tag == "sinh") return args[0] / std::tanh(x);
        return 0.0;
    }

    bool is_one() const { return tag == "one" && scale == 1.0; }
};

// ---------------------------------------------------------------------------
// Scenario configuration, one field per `section.key = value` line.

struct ScenarioConfig {
    std::string name;

    double x_lo = 0.0;
    double x_hi = 0.0;
    Expression weight;                        // operator.weight, the measure m
    Expression coefficient;                   // operator.coefficient, defaults to one
    Expression potential{.text = "zero", .tag = "zero", .scale = 1.0, .args = {}};
    double shift = 0.0;                       // constant added to the potential

    std::vector<double> lambdas;

    std::string eigen_kind = "closed-form";   // "shooting" | "closed-form"
    std::string eigen_tag = "one";            // closed-form registry: one | cos
    double shoot_u0 = 1.0;
    double shoot_du0 = 0.0;

    std::string reference_kind = "one";       // "one" | "ground-state"
    bool reference_auto = false;              // ground-state(auto)
    Expression reference_form;                // ground-state(<expression>)

    std::string policy = "geometric";         // geometric | paper-double-exponential | intrinsic
    double policy_a = 2.0;                    // geometric base | anchor scale | intrinsic b
    double policy_b = 1.5;                    // geometric spread | anchor offset
    std::size_t n_max = 0;

    std::size_t cells = 0;
    std::string grading = "uniform";          // uniform | geometric(ratio)
    double grading_ratio = 1.0;

    std::string out_dir;

    // key/value lines in file order, echoed into report provenance
    std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

struct ConfigError {
    std::string code;
    std::string message;
};

struct ConfigErrors {
    std::vector<ConfigError> list;

    void add(const std::string& code, std::size_t line, std::size_t col,
             const std::string& what) {
        list.push_back({code, "line " + std::to_string(line) + ", column " +
                                  std::to_string(col) + ": " + what});
    }
    void add(const std::string& code, const std::string& what) {
        list.push_back({code, what});
    }
    void raise_if_any() const {
        if (list.empty()) return;
        std::string all = list.front().message;
        for (std::size_t i = 1; i < list.size(); ++i) all += "; " + list[i].message;
        throw error(list.front().code, all);
    }
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Scalars accept "pi" multiples so paper constants stay exact in configs:
// "2pi", "-pi", "0.5pi" next to plain decimal literals.
inline bool parse_scalar(const std::string& tok, double& out) {
    std::string t = trim(tok);
    if (t.empty()) return false;
    double mult = 1.0;
    if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
        mult = 4.0 * std::atan(1.0);
        t = t.substr(0, t.size() - 2);
        if (t.empty() || t == "+") t = "1";
        if (t == "-") t = "-1";
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) return false;
        out = v * mult;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(trim(s.substr(pos)));
            return out;
        }
        out.push_back(trim(s.substr(pos, next - pos)));
        pos = next + 1;
    }
}

// "name(a,b,...)" -> name + raw argument list; no parentheses -> no args.
inline bool split_call(const std::string& s, std::string& head,
                       std::vector<std::string>& raw_args) {
    const std::size_t open = s.find('(');
    if (open == std::string::npos) {
        head = trim(s);
        raw_args.clear();
        return true;
    }
    if (s.back() != ')') return false;
    head = trim(s.substr(0, open));
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    raw_args = inner.empty() ? std::vector<std::string>{} : split(inner, ',');
    return true;
}

inline Expression parse_expression(const std::string& text, std::size_t line,
                                   std::size_t col, ConfigErrors& errs) {
    Expression e;
    e.text = trim(text);
    std::string body = e.text;
    const std::size_t star = body.find('*');
    if (star != std::string::npos) {
        if (!parse_scalar(body.substr(0, star), e.scale)) {
            errs.add("parse-error", line, col,
                     "bad scalar prefix '" + body.substr(0, star) + "'");
            return e;
        }
        body = trim(body.substr(star + 1));
    }

    auto want_args = [&](const std::string& head, const std::vector<std::string>& raw,
                         std::size_t count) {
        if (raw.size() != count) {
            errs.add("parse-error", line, col,
                     head + " takes " + std::to_string(count) + " argument(s)");
            return false;
        }
        for (const auto& r : raw) {
            double v = 0.0;
            if (!parse_scalar(r, v)) {
                errs.add("parse-error", line, col, "bad number '" + r + "'");
                return false;
            }
            e.args.push_back(v);
        }
        return true;
    };

    const std::size_t caret = body.find('^');
    std::string head;
    std::vector<std::string> raw;
    if (caret != std::string::npos &&
        (body.compare(0, caret, "abs_x") == 0 || body.compare(0, caret, "sinh") == 0)) {
        e.tag = body.substr(0, caret);
        double k = 0.0;
        if (!parse_scalar(body.substr(caret + 1), k)) {
            errs.add("parse-error", line, col,
                     "bad exponent '" + body.substr(caret + 1) + "'");
            return e;
        }
        e.args.push_back(k);
        return e;
    }
    if (!split_call(body, head, raw)) {
        errs.add("parse-error", line, col, "unbalanced parentheses in '" + body + "'");
        return e;
    }
    if (head == "one" || head == "zero") {
        e.tag = head;
        if (!raw.empty())
            errs.add("parse-error", line, col, head + " takes no arguments");
        return e;
    }
    if (head == "const" || head == "exp") {
        e.tag = head;
        want_args(head, raw, 1);
        return e;
    }
    if (head == "step") {
        e.tag = head;
        want_args(head, raw, 3);
        return e;
    }
    errs.add("unknown-tag", line, col,
             "unknown tag '" + head + "'; valid tags: " + kValidTags);
    return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// parse_config: line-oriented `section.key = value`, '#' comments, UTF-8.
// Every field-level problem is collected; the throw carries the first error's
// code and all messages at once.

inline ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("io-error", "cannot open config file " + path);

    ScenarioConfig cfg;
    detail::ConfigErrors errs;

    bool saw_name = false, saw_interval = false, saw_weight = false, saw_lambda = false;
    bool saw_eigen = false, saw_reference = false, saw_policy = false, saw_n_max = false;
    bool saw_cells = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        if (detail::trim(line).empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errs.add("parse-error", line_no, line.size() + 1, "expected 'key = value'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const std::size_t key_col = line.find_first_not_of(" \t") + 1;
        std::size_t val_col = line.find_first_not_of(" \t", eq + 1);
        if (val_col == std::string::npos) val_col = line.size();
        ++val_col;
        if (value.empty()) {
            errs.add("parse-error", line_no, val_col, "missing value for '" + key + "'");
            continue;
        }
        cfg.entries.emplace_back(key, value);

        auto scalar = [&](double& out) {
            if (!detail::parse_scalar(value, out))
                errs.add("parse-error", line_no, val_col, "bad number '" + value + "'");
        };
        auto index = [&](std::size_t& out) {
            double v = 0.0;
            if (!detail::parse_scalar(value, v) || v < 0.0 || v != std::floor(v))
                errs.add("parse-error", line_no, val_col,
                         "expected a nonnegative integer, got '" + value + "'");
            else
                out = static_cast<std::size_t>(v);
        };

        if (key == "name") {
            cfg.name = value;
            saw_name = true;
        } else if (key == "operator.interval") {
            const auto parts = detail::split(value, ' ');
            std::vector<double> xs;
            for (const auto& p : parts) {
                if (p.empty()) continue;
                double v = 0.0;
                if (detail::parse_scalar(p, v)) xs.push_back(v);
            }
            if (xs.size() != 2)
                errs.add("parse-error", line_no, val_col,
                         "interval needs two numbers 'lo hi'");
            else {
                cfg.x_lo = xs[0];
                cfg.x_hi = xs[1];
                saw_interval = true;
            }
        } else if (key == "operator.weight") {
            cfg.weight = detail::parse_expression(value, line_no, val_col, errs);
            saw_weight = true;
        } else if (key == "operator.coefficient") {
            cfg.coefficient = detail::parse_expression(value, line_no, val_col, errs);
        } else if (key == "operator.potential") {
            cfg.potential = detail::parse_expression(value, line_no, val_col, errs);
        } else if (key == "operator.shift") {
            scalar(cfg.shift);
        } else if (key == "lambda") {
            for (const auto& p : detail::split(value, ' ')) {
                if (p.empty()) continue;
                double v = 0.0;
                if (!detail::parse_scalar(p, v))
                    errs.add("parse-error", line_no, val_col, "bad number '" + p + "'");
                else
                    cfg.lambdas.push_back(v);
            }
            saw_lambda = !cfg.lambdas.empty();
        } else if (key == "eigenfunction") {
            std::string head;
            std::vector<std::string> raw_args;
            if (!detail::split_call(value, head, raw_args)) {
                errs.add("parse-error", line_no, val_col, "unbalanced parentheses");
            } else if (head == "shooting") {
                cfg.eigen_kind = "shooting";
                if (raw_args.size() != 2 ||
                    !detail::parse_scalar(raw_args[0], cfg.shoot_u0) ||
                    !detail::parse_scalar(raw_args[1], cfg.shoot_du0))
                    errs.add("parse-error", line_no, val_col,
                             "shooting takes initial data (u0, du0)");
                else
                    saw_eigen = true;
            } else if (head == "closed-form") {
                cfg.eigen_kind = "closed-form";
                if (raw_args.size() != 1)
                    errs.add("parse-error", line_no, val_col,
                             "closed-form takes one tag");
                else if (raw_args[0] != "one" && raw_args[0] != "cos")
                    errs.add("unknown-tag", line_no, val_col,
                             "unknown closed form '" + raw_args[0] +
                                 "'; valid forms: one, cos");
                else {
                    cfg.eigen_tag = raw_args[0];
                    saw_eigen = true;
                }
            } else {
                errs.add("unknown-tag", line_no, val_col,
                         "unknown eigenfunction source '" + head +
                             "'; expected shooting(u0, du0) or closed-form(tag)");
            }
        } else if (key == "reference") {
            std::string head;
            std::vector<std::string> raw_args;
            if (!detail::split_call(value, head, raw_args)) {
                errs.add("parse-error", line_no, val_col, "unbalanced parentheses");
            } else if (head == "one") {
                cfg.reference_kind = "one";
                saw_reference = true;
            } else if (head == "ground-state") {
                cfg.reference_kind = "ground-state";
                if (raw_args.size() != 1)
                    errs.add("parse-error", line_no, val_col,
                             "ground-state takes (auto) or one expression");
                else if (raw_args[0] == "auto") {
                    cfg.reference_auto = true;
                    saw_reference = true;
                } else {
                    cfg.reference_form =
                        detail::parse_expression(raw_args[0], line_no, val_col, errs);
                    saw_reference = true;
                }
            } else {
                errs.add("unknown-tag", line_no, val_col,
                         "unknown reference '" + head +
                             "'; expected one or ground-state(...)");
            }
        } else if (key == "schedule.policy") {
            std::string head;
            std::vector<std::string> raw_args;
            if (!detail::split_call(value, head, raw_args)) {
                errs.add("parse-error", line_no, val_col, "unbalanced parentheses");
            } else if (head == "geometric") {
                cfg.policy = "geometric";
                if (raw_args.size() != 2 ||
                    !detail::parse_scalar(raw_args[0], cfg.policy_a) ||
                    !detail::parse_scalar(raw_args[1], cfg.policy_b))
                    errs.add("parse-error", line_no, val_col,
                             "geometric takes (base, spread)");
                else
                    saw_policy = true;
            } else if (head == "paper-double-exponential") {
                cfg.policy = "paper-double-exponential";
                cfg.policy_a = 1.0;
                cfg.policy_b = 0.0;
                if (raw_args.empty())
                    saw_policy = true;
                else if (raw_args.size() != 2 ||
                         !detail::parse_scalar(raw_args[0], cfg.policy_a) ||
                         !detail::parse_scalar(raw_args[1], cfg.policy_b))
                    errs.add("parse-error", line_no, val_col,
                             "paper-double-exponential takes no arguments or the "
                             "native frame anchors (scale, offset)");
                else
                    saw_policy = true;
            } else if (head == "intrinsic") {
                cfg.policy = "intrinsic";
                if (raw_args.size() != 1 ||
                    !detail::parse_scalar(raw_args[0], cfg.policy_a))
                    errs.add("parse-error", line_no, val_col, "intrinsic takes (b)");
                else
                    saw_policy = true;
            } else {
                errs.add("unknown-tag", line_no, val_col,
                         "unknown policy '" + head +
                             "'; expected geometric(base, spread), "
                             "paper-double-exponential[(scale, offset)], or intrinsic(b)");
            }
        } else if (key == "schedule.n_max") {
            index(cfg.n_max);
            saw_n_max = true;
        } else if (key == "grid.cells") {
            index(cfg.cells);
            saw_cells = true;
        } else if (key == "grid.grading") {
            std::string head;
            std::vector<std::string> raw_args;
            if (!detail::split_call(value, head, raw_args)) {
                errs.add("parse-error", line_no, val_col, "unbalanced parentheses");
            } else if (head == "uniform" && raw_args.empty()) {
                cfg.grading = "uniform";
            } else if (head == "geometric" && raw_args.size() == 1 &&
                       detail::parse_scalar(raw_args[0], cfg.grading_ratio)) {
                cfg.grading = "geometric";
            } else {
                errs.add("unknown-tag", line_no, val_col,
                         "unknown grading '" + value +
                             "'; expected uniform or geometric(ratio)");
            }
        } else if (key == "outputs.directory") {
            cfg.out_dir = value;
        } else {
            errs.add("parse-error", line_no, key_col, "unknown key '" + key + "'");
        }
    }

    if (!saw_name) errs.add("parse-error", "missing key 'name'");
    if (!saw_interval) errs.add("parse-error", "missing key 'operator.interval'");
    if (!saw_weight) errs.add("parse-error", "missing key 'operator.weight'");
    if (!saw_lambda) errs.add("parse-error", "missing key 'lambda'");
    if (!saw_eigen) errs.add("parse-error", "missing key 'eigenfunction'");
    if (!saw_reference) errs.add("parse-error", "missing key 'reference'");
    if (!saw_policy) errs.add("parse-error", "missing key 'schedule.policy'");
    if (!saw_n_max) errs.add("parse-error", "missing key 'schedule.n_max'");
    if (!saw_cells) errs.add("parse-error", "missing key 'grid.cells'");

    if (saw_interval && !(cfg.x_lo < cfg.x_hi))
        errs.add("range-violation", "operator.interval needs lo < hi");
    if (!std::isfinite(cfg.shift))
        errs.add("range-violation", "operator.shift must be finite");
    for (double l : cfg.lambdas)
        if (!std::isfinite(l)) errs.add("range-violation", "lambda must be finite");
    if (saw_n_max && cfg.n_max < 3)
        errs.add("range-violation", "schedule.n_max must be at least 3");
    if (saw_cells && cfg.cells < 8)
        errs.add("range-violation", "grid.cells must be at least 8");
    if (saw_eigen && cfg.eigen_kind == "shooting" && cfg.shoot_u0 == 0.0 &&
        cfg.shoot_du0 == 0.0)
        errs.add("range-violation", "eigenfunction.shooting initial data must not vanish");

    errs.raise_if_any();
    return cfg;
}

}  // namespace shnol
