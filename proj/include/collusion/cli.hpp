#pragma once

/// Command-line front end: point, thresholds, sweep-delta, sweep-g, verify,
/// plot. Exit codes: 0 success, 1 verification failure, 2 usage or
/// parameter error, 3 numerical failure.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "collusion/curve_table.hpp"
#include "collusion/errors.hpp"
#include "collusion/model.hpp"
#include "collusion/solvers.hpp"
#include "collusion/svg_plot.hpp"
#include "collusion/sweeps.hpp"
#include "collusion/verify.hpp"

namespace collusion::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailure = 1,
    kUsageError = 2,
    kNumericalFailure = 3,
};

/// Inputs shared by every subcommand. Flags override a JSON config file.
struct RunConfig {
    std::vector<int> n_firms;
    std::vector<double> search_costs;
    double shopper_share = 0.5;
    double valuation = 1.0;
    int grid_points = 1001;
    IntegrationConfig icfg;
    std::string output_path;
    std::string output_format = "csv";
};

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

/// "3", "2,3,5" or "3..10".
inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty() || text.back() == ',') throw ParameterError("cannot parse integer list '" + text + "'");
    std::stringstream ss(text);
    std::string item;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw ParameterError("cannot parse integer list '" + text + "'");
        }
        if (used != s.size()) throw ParameterError("cannot parse integer list '" + text + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
        } else {
            const int lo = to_int(item.substr(0, dots));
            const int hi = to_int(item.substr(dots + 2));
            if (hi < lo) throw ParameterError("empty range '" + item + "'");
            for (int n = lo; n <= hi; ++n) out.push_back(n);
        }
    }
    if (out.empty()) throw ParameterError("empty integer list");
    return out;
}

inline std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    // getline drops a trailing empty field, so catch "0.2," here.
    if (text.empty() || text.back() == ',') throw ParameterError("cannot parse number list '" + text + "'");
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParameterError("cannot parse number list '" + text + "'");
        }
        if (used != item.size()) throw ParameterError("cannot parse number list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParameterError("empty number list");
    return out;
}

namespace detail {

inline std::string list_text(const nlohmann::json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return os.str();
    }
    if (j.is_array()) {
        std::string s;
        for (const auto& e : j) {
            if (!s.empty()) s += ',';
            s += list_text(e);
        }
        return s;
    }
    throw ParameterError("config value must be a number, string or array");
}

/// Option values as text; an empty string means the flag was not given.
struct RawOptions {
    std::string config;
    std::string firms;
    std::string shoppers;
    std::string search_cost;
    std::string valuation;
    std::string grid;
    std::string abs_tol;
    std::string rel_tol;
    std::string out;
    std::string format;
};

inline double to_real(const std::string& key, const std::string& text) {
    const auto v = parse_real_list(text);
    if (v.size() != 1) throw ParameterError("--" + key + " takes a single number");
    return v.front();
}

/// Builds a RunConfig from defaults, then the config file, then flags.
inline RunConfig resolve(const RawOptions& raw, RunConfig cfg) {
    std::map<std::string, std::string> values;
    if (!raw.config.empty()) {
        std::ifstream in(raw.config);
        if (!in) throw ParameterError("cannot open config file '" + raw.config + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParameterError("config file '" + raw.config + "': " + e.what());
        }
        if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
        for (const auto& [key, value] : j.items()) values[key] = list_text(value);
    }
    auto set = [&](const char* key, const std::string& flag) {
        if (!flag.empty()) values[key] = flag;
    };
    set("firms", raw.firms);
    set("shoppers", raw.shoppers);
    set("search-cost", raw.search_cost);
    set("valuation", raw.valuation);
    set("grid", raw.grid);
    set("abs-tol", raw.abs_tol);
    set("rel-tol", raw.rel_tol);
    set("out", raw.out);
    set("format", raw.format);

    for (const auto& [key, text] : values) {
        if (key == "firms") {
            cfg.n_firms = parse_int_list(text);
        } else if (key == "shoppers") {
            cfg.shopper_share = to_real(key, text);
        } else if (key == "search-cost") {
            cfg.search_costs = parse_real_list(text);
        } else if (key == "valuation") {
            cfg.valuation = to_real(key, text);
        } else if (key == "grid") {
            const auto g = parse_int_list(text);
            if (g.size() != 1) throw ParameterError("--grid takes a single integer");
            cfg.grid_points = g.front();
        } else if (key == "abs-tol") {
            cfg.icfg.abs_tol = to_real(key, text);
        } else if (key == "rel-tol") {
            cfg.icfg.rel_tol = to_real(key, text);
        } else if (key == "out") {
            cfg.output_path = text;
        } else if (key == "format") {
            cfg.output_format = text;
        } else {
            throw ParameterError("unknown config key '" + key + "'");
        }
    }

    for (int n : cfg.n_firms) validate_share_and_firms(0.5, n);
    for (double s : cfg.search_costs) validate_costs(s, cfg.valuation);
    if (cfg.grid_points < 2) throw ParameterError("--grid must be at least 2");
    cfg.icfg.validate();
    if (cfg.output_format != "csv" && cfg.output_format != "json" && cfg.output_format != "svg" &&
        cfg.output_format != "text") {
        throw ParameterError("--format must be one of csv, json, svg, text");
    }
    return cfg;
}

inline void add_common(CLI::App* sub, RawOptions& raw, bool with_shoppers) {
    sub->add_option("--config", raw.config, "JSON file with the same keys as the flags");
    sub->add_option("--firms", raw.firms, "number of firms: N, list 2,3,5 or range 3..10");
    if (with_shoppers) sub->add_option("--shoppers", raw.shoppers, "shopper share lambda in (0,1)");
    sub->add_option("--search-cost", raw.search_cost, "search cost s (list allowed for sweeps)");
    sub->add_option("--valuation", raw.valuation, "valuation v");
    sub->add_option("--grid", raw.grid, "number of lambda grid points");
    sub->add_option("--abs-tol", raw.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--rel-tol", raw.rel_tol, "quadrature relative tolerance");
    sub->add_option("--out", raw.out, "output path");
    sub->add_option("--format", raw.format, "csv, json, svg or text");
}

/// Shortest round-trip rendering for human-readable output.
inline std::string num(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& x) {
    return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParameterError("cannot write '" + path.string() + "'");
    f << content;
}

inline std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const EquilibriumPoint& e) {
    nlohmann::ordered_json j;
    j["n_firms"] = e.params.n_firms;
    j["shopper_share"] = e.params.shopper_share;
    j["search_cost"] = e.params.search_cost;
    j["valuation"] = e.params.valuation;
    j["regime"] = std::string(to_string(e.regime));
    j["G"] = e.g_family.g;
    j["G1"] = e.g_family.g1;
    j["G2"] = e.g_family.g2;
    j["G3"] = e.g_family.g3;
    j["G_abs_errors"] = e.g_family.abs_errors;
    j["p_star"] = e.p_star;
    j["profit_collusive"] = e.profit_collusive;
    j["profit_deviation"] = e.profit_deviation;
    j["profit_nash"] = e.profit_nash;
    j["delta_star"] = detail::optional_json(e.delta_star);
    j["h"] = detail::optional_json(e.h);
    j["gamma"] = detail::optional_json(e.gamma);
    return j;
}

inline int cmd_point(const RunConfig& cfg, std::ostream& out) {
    if (cfg.n_firms.size() != 1 || cfg.search_costs.size() != 1) {
        throw ParameterError("point takes a single --firms and --search-cost value");
    }
    const MarketParams p{cfg.n_firms.front(), cfg.shopper_share, cfg.search_costs.front(),
                         cfg.valuation};
    p.validate();
    const auto e = equilibrium_point(p, cfg.icfg);
    const auto j = to_json(e);
    if (cfg.output_format != "json") {
        auto row = [&](const char* name, const std::string& value) {
            out << std::left << std::setw(18) << name << value << '\n';
        };
        auto opt = [](const std::optional<double>& x) {
            return x ? detail::num(*x) : std::string(kNotApplicable);
        };
        row("N", std::to_string(p.n_firms));
        row("lambda", detail::num(p.shopper_share));
        row("s", detail::num(p.search_cost));
        row("v", detail::num(p.valuation));
        row("regime", std::string(to_string(e.regime)));
        row("G", detail::num(e.g_family.g));
        row("G'", detail::num(e.g_family.g1));
        row("G''", detail::num(e.g_family.g2));
        row("G'''", detail::num(e.g_family.g3));
        row("p*", detail::num(e.p_star));
        row("pi_c", detail::num(e.profit_collusive));
        row("pi_d", detail::num(e.profit_deviation));
        row("pi*", detail::num(e.profit_nash));
        row("delta*", opt(e.delta_star));
        row("H", opt(e.h));
        row("Gamma", opt(e.gamma));
        out << '\n';
    }
    out << j.dump(2) << '\n';
    if (!cfg.output_path.empty()) detail::write_file(cfg.output_path, j.dump(2) + "\n");
    return kSuccess;
}

inline nlohmann::ordered_json to_json(const RootResult& r) {
    nlohmann::ordered_json j;
    j["root"] = r.root;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["bracket"] = {r.bracket_final.lo, r.bracket_final.hi};
    return j;
}

inline int cmd_thresholds(const RunConfig& cfg, const SolverConfig& scfg, std::ostream& out,
                          std::ostream& err) {
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    int status = kSuccess;
    for (int n : cfg.n_firms) {
        for (double s : cfg.search_costs) {
            const auto r = thresholds(n, s, cfg.valuation, scfg, cfg.icfg);
            nlohmann::ordered_json j;
            j["n_firms"] = n;
            j["search_cost"] = s;
            j["valuation"] = cfg.valuation;
            j["lambda_hat"] = to_json(r.lambda_hat);
            j["lambda_inflection"] = to_json(r.lambda_inflection);
            j["lambda_tilde"] = to_json(r.lambda_tilde.result);
            j["lambda_tilde"]["fallback"] = r.lambda_tilde.fallback;
            j["lambda_tilde"]["low_curvature"] = r.lambda_tilde.low_curvature;
            all.push_back(j);
            if (r.lambda_tilde.fallback) {
                err << "warning: N=" << n << " s=" << detail::num(s)
                    << ": Gamma has no sign change on (lambda_hat, 1); lambda_tilde is a grid argmin\n";
            }
            if (r.lambda_tilde.low_curvature) {
                err << "warning: N=" << n << " s=" << detail::num(s)
                    << ": |Gamma| below f_tol around lambda_tilde (flat minimum)\n";
            }
            for (const auto* root : {&r.lambda_hat, &r.lambda_inflection}) {
                if (!root->converged) {
                    err << "warning: N=" << n << " s=" << detail::num(s)
                        << ": a threshold solver did not converge\n";
                }
            }
            if (!(r.lambda_hat.root < r.lambda_tilde.result.root)) {
                err << "error: N=" << n << " s=" << detail::num(s)
                    << ": ordering lambda_hat < lambda_tilde violated\n";
                status = kNumericalFailure;
            }
            if (cfg.output_format != "json") {
                out << "N=" << n << " s=" << detail::num(s) << " v=" << detail::num(cfg.valuation)
                    << '\n';
                out << "  lambda_hat        " << detail::num(r.lambda_hat.root) << "  residual "
                    << detail::num(r.lambda_hat.residual) << '\n';
                out << "  lambda_inflection " << detail::num(r.lambda_inflection.root)
                    << "  residual " << detail::num(r.lambda_inflection.residual) << '\n';
                out << "  lambda_tilde      " << detail::num(r.lambda_tilde.result.root)
                    << "  residual " << detail::num(r.lambda_tilde.result.residual)
                    << (r.lambda_tilde.fallback ? "  (grid fallback)" : "") << '\n';
            }
        }
    }
    if (cfg.output_format == "json") out << all.dump(2) << '\n';
    if (!cfg.output_path.empty()) detail::write_file(cfg.output_path, all.dump(2) + "\n");
    return status;
}

namespace detail {

inline std::string encode_table(const CurveTable& t, const std::string& format,
                                const std::string& title) {
    if (format == "json") return to_json(t).dump(2) + "\n";
    if (format == "svg") return render_svg(t, SvgOptions{title, {}});
    return to_csv(t);
}

inline std::string extension(const std::string& format) {
    if (format == "json") return ".json";
    if (format == "svg") return ".svg";
    return ".csv";
}

}  // namespace detail

inline int cmd_sweep_delta(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SweepOptions opt;
    opt.grid_points = cfg.grid_points;
    opt.icfg = cfg.icfg;
    const std::filesystem::path dir = cfg.output_path.empty() ? "." : cfg.output_path;
    int status = kSuccess;
    for (int n : cfg.n_firms) {
        for (double s : cfg.search_costs) {
            const auto sweep = sweep_delta(n, s, cfg.valuation, opt);
            for (const auto& e : sweep.row_errors) err << "warning: " << e << '\n';
            if (!sweep.row_errors.empty()) status = kNumericalFailure;
            const std::string stem = "delta_N" + std::to_string(n) + "_s" + detail::short_number(s);
            const auto path = dir / (stem + detail::extension(cfg.output_format));
            detail::write_file(path, detail::encode_table(
                                         sweep.table, cfg.output_format,
                                         "critical discount factor, N=" + std::to_string(n) +
                                             ", s=" + detail::short_number(s)));
            out << "wrote " << path.string() << '\n';
        }
    }
    return status;
}

inline int cmd_sweep_g(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SweepOptions opt;
    opt.grid_points = cfg.grid_points;
    opt.icfg = cfg.icfg;
    const auto sweep = sweep_g(cfg.n_firms, opt);
    for (const auto& e : sweep.row_errors) err << "warning: " << e << '\n';
    const std::filesystem::path dir = cfg.output_path.empty() ? "." : cfg.output_path;
    const auto path = dir / ("g_curves" + detail::extension(cfg.output_format));
    detail::write_file(path, detail::encode_table(sweep.table, cfg.output_format, "G(lambda;N)"));
    out << "wrote " << path.string() << '\n';
    const auto violation = first_ordering_violation(sweep.table);
    if (violation) {
        out << "ordering 1-lambda <= G(.;N) ascending in N: VIOLATED at row " << *violation << '\n';
        return kVerificationFailure;
    }
    out << "ordering 1-lambda <= G(.;N) ascending in N: holds at all " << sweep.table.rows.size()
        << " rows\n";
    return sweep.row_errors.empty() ? kSuccess : kNumericalFailure;
}

inline int cmd_verify(const RunConfig& cfg, const SuiteConfig& base, std::ostream& out) {
    SuiteConfig suite = base;
    suite.n_list = cfg.n_firms;
    suite.grid_size = cfg.grid_points;
    suite.s_list = cfg.search_costs;
    suite.valuation = cfg.valuation;
    suite.icfg = cfg.icfg;
    const auto result = run_suite(suite);
    for (const auto& r : result.reports) {
        out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << r.name
            << " margin=" << detail::num(r.worst_case_margin) << " tol=" << detail::num(r.tolerance_used)
            << " at N=" << r.worst_n << " lambda=" << detail::num(r.worst_lambda)
            << " samples=" << r.samples;
        if (!r.detail.empty()) out << " [" << r.detail << "]";
        out << '\n';
    }
    const std::string path = cfg.output_path.empty() ? "verify_report.json" : cfg.output_path;
    detail::write_file(path, to_json(result).dump(2) + "\n");
    if (result.all_passed()) {
        out << "all " << result.reports.size() << " checks passed\n";
        return kSuccess;
    }
    out << "failed:";
    for (const auto& name : result.failed_names()) out << ' ' << name;
    out << '\n';
    return kVerificationFailure;
}

inline int cmd_plot(const std::string& csv_path, std::string svg_path, const SvgOptions& opt,
                    std::ostream& out) {
    std::ifstream in(csv_path);
    if (!in) throw ParameterError("cannot open '" + csv_path + "'");
    const auto table = read_csv(in);
    if (svg_path.empty()) svg_path = std::filesystem::path(csv_path).replace_extension(".svg").string();
    detail::write_file(svg_path, render_svg(table, opt));
    out << "wrote " << svg_path << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical discount factor and reservation price in N-firm costly search markets"};
    app.require_subcommand(1);

    detail::RawOptions point_raw, thr_raw, sd_raw, sg_raw, ver_raw;
    auto* point = app.add_subcommand("point", "evaluate every model quantity at one (N, lambda, s, v)");
    detail::add_common(point, point_raw, true);

    auto* thr = app.add_subcommand("thresholds", "lambda_hat, lambda_inflection and lambda_tilde");
    detail::add_common(thr, thr_raw, false);
    double x_tol = SolverConfig{}.x_tol;
    double f_tol = SolverConfig{}.f_tol;
    thr->add_option("--x-tol", x_tol, "root bracket width tolerance");
    thr->add_option("--f-tol", f_tol, "root residual tolerance");

    auto* sd = app.add_subcommand("sweep-delta", "critical discount factor curves over lambda");
    detail::add_common(sd, sd_raw, false);

    auto* sg = app.add_subcommand("sweep-g", "1-lambda and G(lambda;N) curves");
    detail::add_common(sg, sg_raw, false);

    auto* ver = app.add_subcommand("verify", "run the numerical certification suite");
    detail::add_common(ver, ver_raw, false);
    SuiteConfig suite;
    ver->add_option("--identity-grid", suite.identity_grid, "grid for identity checks");
    ver->add_option("--argmin-grid", suite.argmin_grid, "grid for the delta* argmin oracle");
    std::string delta_firms;
    ver->add_option("--delta-firms", delta_firms, "N list for the delta* checks (default 2..5)");
    ver->add_option("--hprime-prefactor-scale", suite.hprime_prefactor_scale)->group("");

    auto* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
    std::string csv_path;
    std::string svg_path;
    SvgOptions svg_opt;
    std::string plot_columns;
    plot->add_option("csv", csv_path, "input CSV")->required();
    plot->add_option("svg", svg_path, "output SVG (default: input with .svg extension)");
    plot->add_option("--columns", plot_columns, "comma separated columns to draw");
    plot->add_option("--title", svg_opt.title, "chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (point->parsed()) {
            RunConfig d;
            d.n_firms = {2};
            d.search_costs = {0.2};
            d.output_format = "text";
            return cmd_point(detail::resolve(point_raw, d), out);
        }
        if (thr->parsed()) {
            RunConfig d;
            d.n_firms = {2};
            d.search_costs = {0.2};
            d.output_format = "text";
            const SolverConfig scfg{x_tol, f_tol, SolverConfig{}.max_iterations};
            scfg.validate();
            return cmd_thresholds(detail::resolve(thr_raw, d), scfg, out, err);
        }
        if (sd->parsed()) {
            RunConfig d;
            d.n_firms = {2};
            d.search_costs = {0.2, 0.6};
            return cmd_sweep_delta(detail::resolve(sd_raw, d), out, err);
        }
        if (sg->parsed()) {
            RunConfig d;
            d.n_firms = {3, 4, 5};
            d.search_costs = {0.2};
            return cmd_sweep_g(detail::resolve(sg_raw, d), out, err);
        }
        if (ver->parsed()) {
            RunConfig d;
            d.n_firms = suite.n_list;
            d.search_costs = suite.s_list;
            d.grid_points = suite.grid_size;
            if (!delta_firms.empty()) {
                suite.delta_n_list = parse_int_list(delta_firms);
                for (int n : suite.delta_n_list) validate_share_and_firms(0.5, n);
            }
            if (suite.identity_grid < 2 || suite.argmin_grid < 100) {
                throw ParameterError("--identity-grid must be >= 2 and --argmin-grid >= 100");
            }
            const auto cfg = detail::resolve(ver_raw, d);
            if (cfg.grid_points < 100) throw ParameterError("verify needs --grid >= 100");
            return cmd_verify(cfg, suite, out);
        }
        if (plot->parsed()) {
            if (!plot_columns.empty()) {
                std::stringstream ss(plot_columns);
                std::string c;
                while (std::getline(ss, c, ',')) svg_opt.columns.push_back(c);
            }
            return cmd_plot(csv_path, svg_path, svg_opt, out);
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const DomainError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace collusion::cli
