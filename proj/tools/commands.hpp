#pragma once

// Subcommands of the padic_bessel tool. Kept in a header so the tests can
// drive them in-process.

#include <padic_bessel/padic_bessel.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>

namespace padic::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

struct RunConfig {
    long p = 2;
    int n = 1;
    double alpha = 2.0;
    double t = 1.0;
    long gamma_max = 10;
    std::optional<double> tol;
    uint64_t seed = 42;
    int trials = 100;
    std::string in;
    std::string out;
    std::string forcing;
    std::string snapshots;
    std::string roundtrip_out;
    int steps = 64;
    std::vector<double> times;
    bool roundtrip = false;
    bool p_given = false;
    bool n_given = false;
    std::string suite;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, round-trip safe.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline PrimeContext make_context(const RunConfig& c) {
    try {
        return PrimeContext(c.p, c.n);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

inline BesselOrder make_order(const RunConfig& c) {
    const auto ctx = make_context(c);
    if (!(c.alpha > c.n)) {
        throw UsageError("--alpha must satisfy alpha > n (got alpha = " + fmt(c.alpha) + ", n = " +
                         std::to_string(c.n) + ")");
    }
    return BesselOrder(c.alpha, ctx);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline BruhatSchwartzFunction load_function(const std::string& path) {
    try {
        return deserialize(read_file(path));
    } catch (const ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

/// Checks a loaded function against explicitly passed --p/--n.
inline void check_flags_match(const RunConfig& c, const BruhatSchwartzFunction& f, const std::string& what) {
    if (c.p_given && f.context().p() != c.p) {
        throw UsageError(what + " has p = " + std::to_string(f.context().p()) + " but --p " + std::to_string(c.p));
    }
    if (c.n_given && f.context().n() != c.n) {
        throw UsageError(what + " has n = " + std::to_string(f.context().n()) + " but --n " + std::to_string(c.n));
    }
}

/// Writes to --out when given, else to the stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot write " + path);
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

// --- kernel ----------------------------------------------------------------

inline int cmd_kernel(const RunConfig& c, std::ostream& out) {
    const auto order = make_order(c);
    Sink sink(c.out, out);
    auto& os = *sink;
    os << "gamma,norm,k_alpha\n";
    if (c.gamma_max < 0) return kOk;
    for (long g = 0; g <= c.gamma_max; ++g) {
        os << g << ',' << fmt(dpow(c.p, -static_cast<double>(g))) << ',' << fmt(k_alpha(NormExp::of(-g), order))
           << '\n';
    }
    const double mass = k_alpha_mass(order);
    os << "mass," << fmt(mass) << ',' << fmt(std::abs(mass - 1.0)) << '\n';
    return kOk;
}

// --- heat ------------------------------------------------------------------

inline int cmd_heat(const RunConfig& c, std::ostream& out) {
    const auto order = make_order(c);
    if (!(c.t > 0)) throw UsageError("--t must be > 0");
    const auto table = heat_kernel_table(c.t, c.gamma_max, order);
    Sink sink(c.out, out);
    auto& os = *sink;
    os << "gamma,norm,z_value,tail_bound\n";
    for (const auto& [g, z] : table.values) {
        os << g << ',' << fmt(dpow(c.p, -static_cast<double>(g))) << ',' << fmt(z) << ','
           << fmt(heat_tail_envelope(c.t, g + 1, order)) << '\n';
    }
    const double zm = z_mass(c.t, order);
    const double dm = distributional_mass(c.t, order);
    os << "z_mass," << fmt(zm) << ',' << fmt(std::expm1(-c.t)) << ',' << fmt(std::abs(zm - std::expm1(-c.t))) << '\n';
    os << "distributional_mass," << fmt(dm) << ',' << fmt(std::exp(-c.t)) << ','
       << fmt(std::abs(dm - std::exp(-c.t))) << '\n';
    double conv = 0.0, oracle = 0.0;
    for (long g : {0L, 1L, 3L}) conv = std::max(conv, std::abs(heat_convolution_check(c.t / 2, c.t / 2, g, order)));
    for (const auto& [g, z] : table.values) oracle = std::max(oracle, std::abs(z - z_oracle(g, c.t, order)));
    os << "convolution_defect," << fmt(conv) << ",0," << fmt(conv) << '\n';
    os << "oracle_defect," << fmt(oracle) << ",0," << fmt(oracle) << '\n';
    return kOk;
}

// --- fourier ---------------------------------------------------------------

inline int cmd_fourier(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.in.empty()) throw UsageError("fourier needs --in");
    const auto f = load_function(c.in);
    check_flags_match(c, f, c.in);
    const auto Ff = fourier(f);
    {
        Sink sink(c.out, out);
        *sink << serialize(Ff) << '\n';
    }
    if (!c.roundtrip) return kOk;
    const auto FFf = fourier(Ff);
    const double defect = sup_distance(FFf, f.reflected());
    {
        Sink sink(c.roundtrip_out, out);
        *sink << serialize(FFf) << '\n';
    }
    const double tol = c.tol.value_or(1e-12);
    err << "reflection_defect," << fmt(defect) << ',' << fmt(tol) << '\n';
    return defect <= tol ? kOk : kVerificationFailed;
}

// --- evolve ----------------------------------------------------------------

inline std::vector<ForcingStep> load_forcing(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(path + ": malformed JSON: " + e.what());
    }
    if (!j.is_array()) throw UsageError(path + ": forcing schedule must be a JSON array");
    std::vector<ForcingStep> steps;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("time") || !e.contains("function") || !e["time"].is_number()) {
            throw UsageError(path + ": each entry needs a numeric \"time\" and a \"function\"");
        }
        try {
            steps.push_back({e["time"].get<double>(), from_json(e["function"])});
        } catch (const ParseError& ex) {
            throw UsageError(path + ": " + ex.what());
        }
    }
    return steps;
}

inline int cmd_evolve(const RunConfig& c, std::ostream& out) {
    if (c.in.empty()) throw UsageError("evolve needs --in");
    const auto u0 = load_function(c.in);
    check_flags_match(c, u0, c.in);
    RunConfig cc = c;
    cc.p = u0.context().p();
    cc.n = u0.context().n();
    const auto order = make_order(cc);

    EvolutionProblem pb{u0, {}, c.t, c.steps};
    if (!c.forcing.empty()) pb.forcing = load_forcing(c.forcing);
    std::vector<double> times = c.times;
    if (times.empty()) {
        for (int i = 0; i <= 10; ++i) times.push_back(c.t * i / 10.0);
    }
    std::vector<MildSolution> sol;
    try {
        pb.validate();
        sol = duhamel(pb, order, times);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    Sink sink(c.out, out);
    auto& os = *sink;
    os << "time,l2_norm,sup_norm\n";
    for (const auto& s : sol) os << fmt(s.time) << ',' << fmt(l2_norm(s.u)) << ',' << fmt(sup_norm(s.u)) << '\n';

    if (!c.snapshots.empty()) {
        std::ofstream snap(c.snapshots);
        if (!snap) throw UsageError("cannot write " + c.snapshots);
        auto arr = nlohmann::ordered_json::array();
        for (const auto& s : sol) {
            nlohmann::ordered_json e;
            e["time"] = s.time;
            e["error_estimate"] = s.error_estimate;
            e["function"] = to_json(s.u);
            arr.push_back(std::move(e));
        }
        snap << arr.dump() << '\n';
    }
    return kOk;
}

// --- verify ----------------------------------------------------------------

/// Random-function bounds small enough that F(F f) stays near 4096 cells per term.
inline RandomConfig fourier_safe_config(const PrimeContext& ctx, bool complex_coefficients = false) {
    const double budget = std::log(4096.0) / (2.0 * ctx.n() * std::log(static_cast<double>(ctx.p())));
    const long depth = std::max(1L, static_cast<long>(budget));
    RandomConfig cfg;
    cfg.min_radius = -(depth / 2);
    cfg.max_radius = 2;
    cfg.center_bound_exp = static_cast<int>(std::max(1L, depth - depth / 2));
    cfg.complex_coefficients = complex_coefficients;
    return cfg;
}

struct CheckLine {
    std::string suite;
    std::string check;
    int trials = 0;
    double worst = 0.0;
    double tol = 0.0;
    int failures = 0;
};

inline uint64_t trial_seed(uint64_t seed, int i) { return seed ^ static_cast<uint64_t>(i); }

inline std::vector<CheckLine> run_suite(const std::string& suite, const RunConfig& c) {
    const auto order = make_order(c);
    const auto& ctx = order.context();
    const double tol12 = c.tol.value_or(1e-12);
    std::deque<CheckLine> lines;  // stable references
    auto line = [&](std::string check, double tol) -> CheckLine& {
        lines.push_back({suite, std::move(check), 0, 0.0, tol, 0});
        return lines.back();
    };
    auto record = [](CheckLine& l, double defect, bool ok) {
        ++l.trials;
        l.worst = std::max(l.worst, defect);
        if (!ok) ++l.failures;
    };
    RandomConfig real_cfg;
    RandomConfig complex_cfg;
    complex_cfg.complex_coefficients = true;

    if (suite == "pmp") {
        auto& l = line("operator_value_at_argmax", tol12);
        l.worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < c.trials; ++i) {
            const auto r = pmp_check(order, random_test_function(trial_seed(c.seed, i), ctx, real_cfg), tol12);
            record(l, r.operator_value, r.pass);
        }
    } else if (suite == "dissipative") {
        auto& q = line("quadratic_form", tol12);
        q.worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < c.trials; ++i) {
            const double v = quadratic_form(order, random_test_function(trial_seed(c.seed, i), ctx, complex_cfg));
            record(q, v, v <= tol12);
        }
        auto& d = line("c0_sup_norm_deficit", tol12);
        d.worst = -std::numeric_limits<double>::infinity();
        std::mt19937_64 rng(c.seed);
        for (int i = 0; i < c.trials; ++i) {
            const double lambda = std::pow(10.0, static_cast<double>(uniform_int(rng, -100, 100)) / 100.0);
            const auto r = c0_dissipativity_check(order, random_test_function(trial_seed(c.seed, i), ctx, real_cfg),
                                                  lambda, tol12);
            record(d, r.rhs - r.lhs, r.pass);
        }
    } else if (suite == "selfadjoint") {
        auto& l = line("adjoint_defect", tol12);
        for (int i = 0; i < c.trials; ++i) {
            const auto f = random_test_function(trial_seed(c.seed, 2 * i), ctx, complex_cfg);
            const auto g = random_test_function(trial_seed(c.seed, 2 * i + 1), ctx, complex_cfg);
            const double v = std::abs(adjoint_defect(order, f, g));
            record(l, v, v <= tol12);
        }
    } else if (suite == "contraction") {
        auto& l = line("l2_ratio_minus_one", tol12);
        l.worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < c.trials; ++i) {
            const double v = contraction_check(order, random_test_function(trial_seed(c.seed, i), ctx, complex_cfg)) - 1.0;
            record(l, v, v <= tol12);
        }
    } else if (suite == "resolvent") {
        for (double lambda : {0.1, 1.0, 10.0}) {
            auto& l = line("residual_lambda_" + fmt(lambda), tol12);
            for (int i = 0; i < c.trials; ++i) {
                const auto f = random_test_function(trial_seed(c.seed, i), ctx, complex_cfg);
                const double v = resolvent_residual(order, lambda, resolvent(order, lambda, f), f);
                record(l, v, v <= tol12);
            }
        }
    } else if (suite == "fourier") {
        const auto cfg = fourier_safe_config(ctx, true);
        auto& pl = line("parseval_defect", tol12);
        auto& rl = line("reflection_defect", tol12);
        // references into `lines` stay valid: no more push_back below
        for (int i = 0; i < c.trials; ++i) {
            const auto f = random_test_function(trial_seed(c.seed, 2 * i), ctx, cfg);
            const auto g = random_test_function(trial_seed(c.seed, 2 * i + 1), ctx, cfg);
            const double pv = std::abs(parseval_check(f, g));
            record(pl, pv, pv <= tol12);
            const double rv = sup_distance(fourier(fourier(f)), f.reflected());
            record(rl, rv, rv <= tol12);
        }
    } else if (suite == "heat") {
        const double t = c.t > 0 ? c.t : 1.0;
        auto& o = line("z_closed_vs_oracle", tol12);
        auto& s = line("z_sign_and_support", 0.0);
        s.worst = -std::numeric_limits<double>::infinity();
        auto& m = line("z_mass_defect", c.tol.value_or(1e-10));
        auto& cv = line("convolution_defect", c.tol.value_or(1e-9));
        for (long g = 0; g <= std::max(c.gamma_max, 0L); ++g) {
            const double z = z_closed(g, t, order);
            const double v = std::abs(z - z_oracle(g, t, order));
            record(o, v, v <= o.tol);
            record(s, z, z < 0 && z_closed(NormExp::of(g + 1), t, order) == 0.0);
        }
        const double mv = std::abs(z_mass(t, order) - std::expm1(-t));
        record(m, mv, mv <= m.tol);
        for (long g : {0L, 1L, 3L}) {
            const double v = std::abs(heat_convolution_check(t / 2, t / 2, g, order));
            record(cv, v, v <= cv.tol);
        }
    } else if (suite == "negdef") {
        auto& l = line("witness_value", 0.0);
        const auto w = negdef_witness(order);
        l.check = "witness_shell_" + std::to_string(w.shell);
        record(l, w.value, w.value < 0);
        l.worst = w.value;
    } else {
        throw UsageError("unknown suite \"" + suite +
                         "\" (expected pmp, dissipative, selfadjoint, contraction, resolvent, fourier, heat, negdef, all)");
    }
    return {lines.begin(), lines.end()};
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
    static const std::vector<std::string> all = {"pmp",       "dissipative", "selfadjoint", "contraction",
                                                 "resolvent", "fourier",     "heat",        "negdef"};
    if (c.trials < 0) throw UsageError("--trials must be >= 0");
    std::vector<std::string> suites;
    if (c.suite == "all") {
        suites = all;
    } else if (std::find(all.begin(), all.end(), c.suite) != all.end()) {
        suites = {c.suite};
    } else {
        throw UsageError("unknown suite \"" + c.suite + "\"");
    }
    make_order(c);
    Sink sink(c.out, out);
    auto& os = *sink;
    os << "suite,check,trials,worst,tolerance,failures,status\n";
    bool ok = true;
    for (const auto& s : suites) {
        for (const auto& l : run_suite(s, c)) {
            ok = ok && l.failures == 0;
            os << l.suite << ',' << l.check << ',' << l.trials << ',' << fmt(l.worst) << ',' << fmt(l.tol) << ','
               << l.failures << ',' << (l.failures == 0 ? "pass" : "FAIL") << '\n';
        }
    }
    return ok ? kOk : kVerificationFailed;
}

// --- entry point -----------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bessel potentials, heat kernels and semigroups on Q_p^n"};
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&c](CLI::App* sub) {
        sub->add_option("--p", c.p, "prime p");
        sub->add_option("--n", c.n, "dimension n");
        sub->add_option("--alpha", c.alpha, "Bessel order, alpha > n");
        sub->add_option("--tol", c.tol, "tolerance override");
        sub->add_option("--out", c.out, "output path (default stdout)");
    };
    auto* kernel = app.add_subcommand("kernel", "table of K_alpha by shell, with its mass");
    common(kernel);
    kernel->add_option("--gamma-max", c.gamma_max, "deepest shell p^{-gamma}");

    auto* heat = app.add_subcommand("heat", "table of the heat kernel z(x,t) with mass and convolution checks");
    common(heat);
    heat->add_option("--t", c.t, "time t > 0");
    heat->add_option("--gamma-max", c.gamma_max, "deepest shell p^{-gamma}");

    auto* four = app.add_subcommand("fourier", "Fourier transform of a test function file");
    common(four);
    four->add_option("--in", c.in, "input function (JSON)");
    four->add_flag("--roundtrip", c.roundtrip, "also compute F(F f) and its defect against f(-x)");
    four->add_option("--roundtrip-out", c.roundtrip_out, "path for F(F f) (default stdout)");

    auto* evolve = app.add_subcommand("evolve", "mild solution of u' = -J^alpha u + f");
    common(evolve);
    evolve->add_option("--in", c.in, "initial datum (JSON)");
    evolve->add_option("--forcing", c.forcing, "forcing schedule (JSON array of {time, function})");
    evolve->add_option("--t", c.t, "horizon T > 0");
    evolve->add_option("--steps", c.steps, "Simpson panels (even)");
    evolve->add_option("--times", c.times, "output times (comma separated)")->delimiter(',');
    evolve->add_option("--snapshots", c.snapshots, "path for serialized u(t) snapshots");

    auto* verify = app.add_subcommand("verify", "run a property battery");
    common(verify);
    verify->add_option("suite", c.suite, "pmp|dissipative|selfadjoint|contraction|resolvent|fourier|heat|negdef|all")
        ->required();
    verify->add_option("--trials", c.trials, "random trials");
    verify->add_option("--seed", c.seed, "base seed");
    verify->add_option("--t", c.t, "time for the heat suite");
    verify->add_option("--gamma-max", c.gamma_max, "deepest shell for the heat suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }
    for (auto* sub : app.get_subcommands()) {
        c.p_given = sub->count("--p") > 0;
        c.n_given = sub->count("--n") > 0;
    }

    try {
        if (*kernel) return cmd_kernel(c, out);
        if (*heat) return cmd_heat(c, out);
        if (*four) return cmd_fourier(c, out, err);
        if (*evolve) return cmd_evolve(c, out);
        if (*verify) return cmd_verify(c, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace padic::cli
