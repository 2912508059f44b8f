#include "failsafe/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "failsafe/error.hpp"
#include "failsafe/fileio.hpp"
#include "failsafe/fitlab.hpp"
#include "failsafe/io.hpp"
#include "failsafe/mcsim.hpp"

namespace failsafe::cli {

using io::json;

namespace {

// Built-in figure configurations (mirrors configs/*.json).
constexpr const char* kFigureConfigs = R"({
  "figure1": {
    "x": {"generator": {"family": "GumbelBarnett", "theta": 0.2},
          "model": {"kind": "Scale", "baseline": {"family": "ExpWeibull", "params": [0.9, 0.9]}},
          "theta": [0.12, 0.28, 0.51, 0.62, 0.73]},
    "y": {"generator": {"family": "GumbelBarnett", "theta": 0.2},
          "model": {"kind": "Scale", "baseline": {"family": "ExpWeibull", "params": [0.9, 0.9]}},
          "theta": [0.21, 0.42, 0.73, 0.89, 0.92]},
    "x_max": 10.0},
  "figure2": {
    "x": {"generator": {"family": "Clayton", "theta": 10},
          "model": {"kind": "Scale", "baseline": {"family": "ExpWeibull", "params": [0.9, 0.9]}},
          "theta": [0.13, 0.31, 0.49, 0.61, 0.72]},
    "y": {"generator": {"family": "Clayton", "theta": 10},
          "model": {"kind": "Scale", "baseline": {"family": "ExpWeibull", "params": [0.9, 0.9]}},
          "theta": [0.22, 0.41, 0.71, 0.88, 0.92]},
    "x_max": 10.0},
  "figure3": {
    "x": {"generator": {"family": "Clayton", "theta": 1.0822},
          "model": {"kind": "Scale", "baseline": {"family": "Weibull", "params": [1, 67.739]}},
          "theta": [0.002929653454222553, 0.0029269317822936433,
                    0.0029230381590939518, 0.0029135508668105183]},
    "y": {"generator": {"family": "Clayton", "theta": 1.0822},
          "model": {"kind": "Scale", "baseline": {"family": "Weibull", "params": [1, 67.739]}},
          "theta": [0.002937826484329487, 0.0029186147203835756,
                    0.0029016981832978, 0.0028972733066728]},
    "x_max": 0.0}
})";

std::vector<double> parse_vector(const std::string& s, const std::string& what) {
    std::string t = s;
    const auto first = t.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && t[first] == '[') {
        const auto j = io::parse_json(t, what);
        std::vector<double> out;
        require(j.is_array(), what + ": expected an array");
        for (const auto& v : j) {
            require(v.is_number(), what + ": expected numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    std::replace_if(t.begin(), t.end(), [](char c) { return c == ',' || c == ';'; }, ' ');
    std::istringstream in(t);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError(what + ": not a number: '" + tok + "'");
        }
    }
    require(!out.empty(), what + ": empty vector");
    return out;
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_file_atomic(path, content);
}

std::vector<double> make_grid(const std::vector<const SystemSpec*>& systems, int points,
                              double x_min, double x_max, const std::string& spacing) {
    require(points >= 2, "grid: need at least 2 points");
    if (x_max > 0.0) {
        if (spacing == "log") {
            require(x_min > 0.0, "grid: log spacing needs --x-min > 0");
            return logspace(x_min, x_max, points);
        }
        // Linear grid on (x_min, x_max], excluding the left end.
        std::vector<double> xs(static_cast<std::size_t>(points));
        for (int k = 0; k < points; ++k) xs[k] = x_min + (x_max - x_min) * (k + 1) / points;
        return xs;
    }
    return default_grid(systems, points);
}

struct Grid {
    int points = 1000;
    double x_min = 0.0;
    double x_max = 0.0;
    std::string spacing = "linear";
};

void add_grid_options(CLI::App* app, Grid& g) {
    app->add_option("--points", g.points, "Number of grid points")->check(CLI::Range(2, 10000000));
    app->add_option("--x-min", g.x_min, "Left end of the grid (exclusive for linear spacing)");
    app->add_option("--x-max", g.x_max,
                    "Right end of the grid; default grid is log-spaced mixture quantiles");
    app->add_option("--spacing", g.spacing, "Grid spacing when --x-max is given")
        ->check(CLI::IsMember({"linear", "log"}));
}

// Config values are injected as flags unless the same flag is already present.
void merge_config(std::vector<std::string>& args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    std::string path;
    if (it != args.end()) {
        require(it + 1 != args.end(), "--config needs a path");
        path = *(it + 1);
        args.erase(it, it + 2);
    } else {
        for (auto a = args.begin(); a != args.end(); ++a)
            if (a->rfind("--config=", 0) == 0) {
                path = a->substr(9);
                args.erase(a);
                break;
            }
    }
    if (path.empty()) return;
    const json cfg = io::parse_json(read_file(path), path);
    require(cfg.is_object(), path + ": config must be a JSON object");

    // Subcommand: first non-flag argument, or the config's "command".
    std::string sub;
    for (const auto& a : args)
        if (!a.empty() && a[0] != '-') {
            sub = a;
            break;
        }
    if (sub.empty() && cfg.contains("command")) {
        sub = cfg.at("command").get<std::string>();
        args.insert(args.begin(), sub);
    }
    json flat = json::object();
    for (auto& [k, v] : cfg.items())
        if (!v.is_object() && k != "command") flat[k] = v;
    if (!sub.empty() && cfg.contains(sub) && cfg.at(sub).is_object())
        for (auto& [k, v] : cfg.at(sub).items()) flat[k] = v;

    auto present = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    for (auto& [k, v] : flat.items()) {
        const std::string flag = "--" + k;
        if (present(flag)) continue;
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                args.push_back(flag);
                args.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            }
        } else {
            args.push_back(flag);
            args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
}

void emit_figures(const std::string& dir, std::ostream& out) {
    const json cfg = json::parse(kFigureConfigs);
    for (auto& [name, fig] : cfg.items()) {
        const SystemSpec x = io::system_from_json(fig.at("x"));
        const SystemSpec y = io::system_from_json(fig.at("y"));
        const double x_max = fig.at("x_max").get<double>();
        const std::vector<const SystemSpec*> both{&x, &y};
        const auto xs = make_grid(both, 1000, 0.0, x_max, "linear");
        const auto cx = curve(x, xs);
        const auto cy = curve(y, xs);
        const auto base = (std::filesystem::path(dir) / name).string();
        write_file_atomic(base + ".csv", io::paired_curve_csv(cx, cy));
        json meta{{"x", io::to_json(x)},
                  {"y", io::to_json(y)},
                  {"verdict", io::to_json(compare_curves(cx, cy))}};
        write_file_atomic(base + ".json", meta.dump(2) + "\n");
        out << base << ".csv\n";
    }
}

std::uint64_t default_seed() {
    if (const char* s = std::getenv("FAILSAFE_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw ValidationError("FAILSAFE_SEED is not an unsigned integer");
        }
    }
    return kDefaultSeed;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    try {
        merge_config(args);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    CLI::App app{"Reliability of fail-safe systems with dependent, heterogeneous components"};
    app.name("failsafe");
    app.require_subcommand(0, 1);
    std::string figures_dir;
    app.add_option("--emit-figures", figures_dir,
                   "Write the example figure curves (CSV + JSON) into this directory");
    app.add_option("--config", "JSON file whose keys fill in flags not given on the command line");

    // preorder
    auto* pre = app.add_subcommand("preorder", "Classify two vectors under the five preorders");
    std::string a_str, b_str, a_file, b_file, pre_out;
    double pre_tol = preorders::kDefaultTol;
    pre->add_option("--a", a_str, "Vector a (comma separated or JSON array)");
    pre->add_option("--b", b_str, "Vector b");
    pre->add_option("--a-file", a_file, "File holding vector a")->check(CLI::ExistingFile);
    pre->add_option("--b-file", b_file, "File holding vector b")->check(CLI::ExistingFile);
    pre->add_option("--tol", pre_tol, "Absolute tolerance on each prefix inequality");
    pre->add_option("--out", pre_out, "Output JSON path (default stdout)");

    // curve
    auto* cur = app.add_subcommand("curve", "Survival curve of the second-smallest lifetime");
    std::string cur_sys, cur_paired, cur_out, cur_verdict;
    Grid cur_grid;
    cur->add_option("system,--system", cur_sys, "System JSON")->required()->check(CLI::ExistingFile);
    cur->add_option("--paired", cur_paired, "Second system JSON: emit x,survival_x,survival_y,gap")
        ->check(CLI::ExistingFile);
    cur->add_option("--out", cur_out, "Output CSV path (default stdout)");
    cur->add_option("--verdict", cur_verdict, "With --paired: write the dominance verdict JSON here");
    add_grid_options(cur, cur_grid);

    // verify
    auto* ver = app.add_subcommand("verify", "Check theorem hypotheses and confirm on a grid");
    std::string ver_id, ver_x, ver_y, ver_out;
    Grid ver_grid;
    ver_grid.points = 1000;
    GridPolicy policy;
    ver->add_option("theorem,--theorem", ver_id, "t1, t2, p-mphrs or p-ls")
        ->required()
        ->check(CLI::IsMember({"t1", "t2", "p-mphrs", "p-ls"}));
    ver->add_option("x,--x", ver_x, "System X JSON")->required()->check(CLI::ExistingFile);
    ver->add_option("y,--y", ver_y, "System Y JSON")->required()->check(CLI::ExistingFile);
    ver->add_option("--out", ver_out, "Output JSON path (default stdout)");
    ver->add_option("--shape-x-points", policy.x_points, "x points for shape checks");
    ver->add_option("--param-points", policy.param_points, "Parameter points for shape checks");
    ver->add_option("--shape-tol", policy.shape_tol, "Tolerance of shape checks");
    ver->add_option("--dominance-tol", policy.dominance_tol, "Dominance tolerance");
    ver->add_option("--crossing-tol", policy.crossing_tol, "Crossing tolerance");
    ver->add_option("--preorder-tol", policy.preorder_tol, "Tolerance of the preorder check");
    add_grid_options(ver, ver_grid);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo check of the analytic survival");
    std::string sim_sys, sim_out, sim_dump;
    std::size_t sim_count = 200000;
    std::uint64_t sim_seed = 0;
    bool seed_given = false;
    int sim_points = 20;
    sim->add_option("system,--system", sim_sys, "System JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--count", sim_count, "Number of simulated systems")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Seed (default: $FAILSAFE_SEED or built-in)")
        ->each([&](const std::string&) { seed_given = true; });
    sim->add_option("--points", sim_points, "Grid points")->check(CLI::Range(2, 100000));
    sim->add_option("--out", sim_out, "Output CSV path (default stdout)");
    sim->add_option("--dump-lifetimes", sim_dump, "Write the lifetime matrix to this CSV");

    // fit
    auto* fit = app.add_subcommand("fit", "Marginal fits, copula fits and subset comparison");
    std::string fit_data, fit_out_dir, fit_subsets, fit_method = "tau";
    std::vector<std::string> fit_families{"Exponential", "Gamma", "Weibull", "Burr"};
    std::vector<std::string> fit_copulas{"Clayton", "GumbelTable3", "Frank"};
    int boot_n = fitlab::kDefaultBootN;
    std::uint64_t fit_seed = 0;
    bool fit_seed_given = false;
    fit->add_option("data,--data", fit_data, "Data CSV (long or wide)")->required();
    fit->add_option("--families", fit_families, "Marginal families")->delimiter(',');
    fit->add_option("--copulas", fit_copulas, "Copula families")->delimiter(',');
    fit->add_option("--boot-n", boot_n, "Bootstrap replicates")->check(CLI::Range(100, 1000000));
    fit->add_option("--seed", fit_seed, "Seed (default: $FAILSAFE_SEED or built-in)")
        ->each([&](const std::string&) { fit_seed_given = true; });
    fit->add_option("--method", fit_method, "Copula estimation")->check(CLI::IsMember({"tau", "pl"}));
    fit->add_option("--subsets", fit_subsets, "Subset comparison JSON")->check(CLI::ExistingFile);
    fit->add_option("--out-dir", fit_out_dir, "Write report.json, table4.csv, table5.csv here");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    try {
        if (!figures_dir.empty()) emit_figures(figures_dir, out);

        if (pre->parsed()) {
            require(!a_str.empty() || !a_file.empty(), "preorder: give --a or --a-file");
            require(!b_str.empty() || !b_file.empty(), "preorder: give --b or --b-file");
            const auto a = parse_vector(a_file.empty() ? a_str : read_file(a_file), "a");
            const auto b = parse_vector(b_file.empty() ? b_str : read_file(b_file), "b");
            emit(io::to_json(preorders::classify(a, b, pre_tol)).dump(2) + "\n", pre_out, out);
            return kOk;
        }

        if (cur->parsed()) {
            const SystemSpec x = io::load_system(cur_sys);
            std::vector<const SystemSpec*> systems{&x};
            std::optional<SystemSpec> y;
            if (!cur_paired.empty()) {
                y = io::load_system(cur_paired);
                systems.push_back(&*y);
            }
            const auto xs =
                make_grid(systems, cur_grid.points, cur_grid.x_min, cur_grid.x_max, cur_grid.spacing);
            const auto cx = curve(x, xs);
            if (!y) {
                emit(io::curve_csv(cx), cur_out, out);
                return kOk;
            }
            const auto cy = curve(*y, xs);
            emit(io::paired_curve_csv(cx, cy), cur_out, out);
            if (!cur_verdict.empty())
                write_file_atomic(cur_verdict, io::to_json(compare_curves(cx, cy)).dump(2) + "\n");
            return kOk;
        }

        if (ver->parsed()) {
            const SystemSpec x = io::load_system(ver_x);
            const SystemSpec y = io::load_system(ver_y);
            policy.curve_points = ver_grid.points;
            if (ver_grid.x_max > 0.0) {
                // Verifier grids are log-spaced; a zero left end falls back to x_max·1e−4.
                const double lo = ver_grid.x_min > 0.0 ? ver_grid.x_min : ver_grid.x_max * 1e-4;
                policy.x_range = std::make_pair(lo, ver_grid.x_max);
            }
            ConditionReport r;
            if (ver_id == "t1") r = verify_theorem1(x, y, policy, false);
            else if (ver_id == "t2") r = verify_theorem2(x, y, policy, false);
            else if (ver_id == "p-mphrs") r = verify_prop_mphrs(x, y, policy, false);
            else r = verify_prop_ls(x, y, policy, false);
            emit(io::to_json(r).dump(2) + "\n", ver_out, out);
            if (r.inconsistent) {
                err << "inconsistency: hypotheses hold but the grid does not confirm dominance\n";
                return kInconsistency;
            }
            return r.overall ? kOk : kHypothesisFail;
        }

        if (sim->parsed()) {
            const SystemSpec s = io::load_system(sim_sys);
            const std::uint64_t seed = seed_given ? sim_seed : default_seed();
            const Matrix life = sample_lifetimes(s, sim_count, seed);
            if (!sim_dump.empty()) write_matrix_csv(life, sim_dump);
            auto second = second_smallest(life);
            std::sort(second.begin(), second.end());
            const auto xs = default_grid(s, sim_points);
            std::string csv = "x,analytic,empirical,abs_diff\n";
            double worst = 0.0;
            for (double x : xs) {
                const double a = survival_x2n(s, x);
                const double e = empirical_survival_sorted(second, x);
                worst = std::max(worst, std::abs(a - e));
                csv += format_double(x) + "," + format_double(a) + "," + format_double(e) + "," +
                       format_double(std::abs(a - e)) + "\n";
            }
            csv += "# max_abs_diff=" + format_double(worst) + " count=" + std::to_string(sim_count) +
                   " seed=" + std::to_string(seed) + "\n";
            emit(csv, sim_out, out);
            return kOk;
        }

        if (fit->parsed()) {
            const std::uint64_t seed = fit_seed_given ? fit_seed : default_seed();
            const auto ds = fitlab::load_csv(fit_data);
            ds.validate(5);
            json report{{"data", fit_data}, {"seed", seed}, {"boot_n", boot_n}};

            std::string t4 = "component,criterion";
            std::vector<fitlab::FitFamily> fams;
            for (const auto& f : fit_families) {
                fams.push_back(fitlab::fit_family_from_string(f));
                t4 += "," + std::string(fitlab::to_string(fams.back()));
            }
            t4 += "\n";
            json marg = json::array();
            for (std::size_t j = 0; j < ds.components(); ++j) {
                const auto v = ds.values(j);
                std::vector<fitlab::FitResult> fits;
                for (auto f : fams) fits.push_back(fitlab::mle_fit(f, v));
                std::string aic_row = ds.labels[j] + ",AIC", bic_row = ds.labels[j] + ",BIC";
                for (const auto& f : fits) {
                    aic_row += "," + format_double(f.aic);
                    bic_row += "," + format_double(f.bic);
                }
                t4 += aic_row + "\n" + bic_row + "\n";
                json ranked = json::array();
                for (const auto& rf : fitlab::rank_models(fits)) {
                    auto jf = io::to_json(rf.fit);
                    jf["delta_aic"] = rf.delta_aic;
                    jf["delta_bic"] = rf.delta_bic;
                    ranked.push_back(jf);
                }
                marg.push_back({{"component", ds.labels[j]}, {"n", v.size()}, {"ranking", ranked}});
            }
            report["marginals"] = marg;

            std::string t5 = "copula,parameter,statistic,p_value\n";
            const Matrix rows = ds.complete_rows();
            json cop = json::array();
            if (ds.components() >= 2 && rows.rows >= 5) {
                const Matrix pseudo = fitlab::pseudo_observations(rows);
                const auto method = fit_method == "pl" ? fitlab::CopulaMethod::PseudoLikelihood
                                                       : fitlab::CopulaMethod::TauInversion;
                double best_p = -1.0;
                for (const auto& c : fit_copulas) {
                    const auto fam = generator_family_from_string(c);
                    const auto g = fitlab::cvm_gof(fam, pseudo, boot_n, seed, method);
                    cop.push_back(io::to_json(g));
                    t5 += std::string(to_string(fam)) + "," + format_double(g.theta) + "," +
                          format_double(g.statistic) + "," + format_double(g.p_value) + "\n";
                    if (g.p_value > best_p) {
                        best_p = g.p_value;
                        report["selected_copula"] = io::to_json(g);
                    }
                }
                report["kendall_tau"] = fitlab::average_kendall_tau(pseudo);
                report["complete_rows"] = rows.rows;
            } else {
                report["copula_note"] = "fewer than 2 components or 5 complete rows; copulas skipped";
            }
            report["copulas"] = cop;

            if (!fit_subsets.empty()) {
                const json sj = io::parse_json(read_file(fit_subsets), fit_subsets);
                const auto model = io::model_from_json(sj.at("model"));
                Generator g = Generator::independence();
                if (sj.contains("generator"))
                    g = io::generator_from_json(sj.at("generator"));
                else if (report.contains("selected_copula"))
                    g = io::generator_from_json(report["selected_copula"]);
                std::vector<fitlab::Candidate> cands;
                for (const auto& c : sj.at("candidates"))
                    cands.push_back({c.at("name").get<std::string>(),
                                     c.at("theta").get<std::vector<double>>()});
                const bool need_thm = sj.value("require_theorem", false);
                report["subsets"] = io::to_json(fitlab::recommend_subset(cands, model, g, {}, need_thm));
            }

            if (!fit_out_dir.empty()) {
                const std::filesystem::path d(fit_out_dir);
                write_file_atomic((d / "report.json").string(), report.dump(2) + "\n");
                write_file_atomic((d / "table4.csv").string(), t4);
                write_file_atomic((d / "table5.csv").string(), t5);
            }
            out << report.dump(2) << "\n";
            return kOk;
        }

        if (figures_dir.empty()) {
            out << app.help();
            return kValidation;
        }
        return kOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << "\n";
        return kValidation;
    } catch (const InconsistencyError& e) {
        err << "inconsistency: " << e.what() << "\n";
        return kInconsistency;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const json::exception& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
}

} // namespace failsafe::cli
