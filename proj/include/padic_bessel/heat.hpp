#pragma once

/**
 * @file heat.hpp
 * @brief Heat kernel of -J^alpha, Cauchy evolution and Duhamel mild solutions.
 *
 * The inverse transform of exp(-t symbol) is the distribution Z_t = delta + z_t:
 * its Fourier transform tends to 1 at infinity, so it carries a point mass.
 * Everything here works with the function part z_t, whose transform is
 * exp(-t symbol) - 1, and reports Z-level quantities as delta + z.
 *
 * On ||x|| = p^{-gamma}, gamma >= 0,
 *   z(x, t) = sum_{i=0}^{gamma} p^{in} (E_i - E_{i+1}),   E_i = exp(-t p^{-i alpha}),
 * and z vanishes for ||x|| >= p.
 */

#include "bessel.hpp"

#include <map>

namespace padic {

namespace detail {

inline void require_positive_time(double t, const char* who) {
    if (!(t > 0)) throw std::invalid_argument(std::string(who) + ": t must be > 0");
}

/// E_i - E_{i+1} without cancellation.
inline double heat_step_difference(double t, long i, const BesselOrder& order) {
    const long p = order.context().p();
    const double a = order.alpha();
    const double ai = t * dpow(p, -static_cast<double>(i) * a);
    const double bi = t * dpow(p, -static_cast<double>(i + 1) * a);
    return std::exp(-bi) * std::expm1(-(ai - bi));
}

}  // namespace detail

/// Geometric bound on sum_{i >= I} p^{in} |E_i - E_{i+1}|.
inline double heat_tail_envelope(double t, long I, const BesselOrder& order) {
    const long p = order.context().p();
    const double a = order.alpha();
    const int n = order.context().n();
    return t * (1.0 - dpow(p, -a)) * dpow(p, static_cast<double>(I) * (n - a)) / (1.0 - dpow(p, n - a));
}

/// Smallest I with heat_tail_envelope(t, I) <= eps.
inline long default_heat_truncation(double t, const BesselOrder& order, double eps = 1e-13) {
    long I = 0;
    while (heat_tail_envelope(t, I, order) > eps && I < 100000) ++I;
    return I;
}

/// z(x, t) for ||x|| = p^{-gamma}.
inline double z_closed(long gamma, double t, const BesselOrder& order) {
    detail::require_positive_time(t, "z_closed");
    if (gamma < 0) return 0.0;
    const long p = order.context().p();
    const int n = order.context().n();
    double s = 0.0;
    for (long i = 0; i <= gamma; ++i) {
        s += dpow(p, static_cast<double>(i * n)) * detail::heat_step_difference(t, i, order);
    }
    return s;
}

/// z(x, t) by the norm of x; the zero norm gives the value at the origin (series to the envelope).
inline double z_closed(NormExp x_norm, double t, const BesselOrder& order) {
    if (x_norm.is_zero()) return z_closed(default_heat_truncation(t, order, 1e-17), t, order);
    return z_closed(-x_norm.exponent(), t, order);
}

/**
 * z(x, t) as the regularized inverse transform of exp(-t symbol) - 1:
 * (e^{-t} - 1) times the unit-ball character integral, plus the shells
 * ||xi|| = p^k, k >= 1, weighted by (E_k - 1). The shell integrals vanish for
 * k >= gamma + 2, so the sum is finite.
 */
inline double z_oracle(NormExp x_norm, double t, const BesselOrder& order) {
    detail::require_positive_time(t, "z_oracle");
    const auto& ctx = order.context();
    const long p = ctx.p();
    const double a = order.alpha();
    double s = std::expm1(-t) * ball_character_integral(0, x_norm, ctx).get_d();
    const long last = x_norm.is_zero() ? default_heat_truncation(t, order, 1e-17) + 1 : 1 - x_norm.exponent();
    for (long k = 1; k <= last; ++k) {
        const Rational w = shell_character_integral(k, x_norm, ctx);
        if (w == 0) continue;
        s += std::expm1(-t * dpow(p, -static_cast<double>(k) * a)) * w.get_d();
    }
    return s;
}

inline double z_oracle(long gamma, double t, const BesselOrder& order) {
    return z_oracle(NormExp::of(-gamma), t, order);
}

/**
 * Closed-form integral of z_t over B_{-g0}(0), g0 >= 0:
 *   p^{-g0 n} z(p^{-(g0-1)}) + (E_{g0} - 1),
 * obtained by exchanging the shell sum with the telescoping sum.
 */
inline double z_ball_mass(long g0, double t, const BesselOrder& order) {
    if (g0 < 0) g0 = 0;
    const long p = order.context().p();
    const int n = order.context().n();
    const double inner = g0 == 0 ? 0.0 : z_closed(g0 - 1, t, order);
    return dpow(p, -static_cast<double>(g0 * n)) * inner +
           std::expm1(-t * dpow(p, -static_cast<double>(g0) * order.alpha()));
}

inline RadialProfile heat_profile(double t, const BesselOrder& order) {
    detail::require_positive_time(t, "heat_profile");
    RadialProfile g{order.context(), {}, {}, 0, 0L, std::nullopt, {}};
    g.value = [t, order](long m) { return m >= 1 ? 0.0 : z_closed(-m, t, order); };
    g.ball_mass = [t, order](long j) { return z_ball_mass(-j, t, order); };
    g.value_at_zero = [t, order] { return z_closed(NormExp::zero(), t, order); };
    return g;
}

/// Shell table of z(., t) for gamma = 0..gamma_max.
struct HeatKernelEval {
    double t = 0.0;
    std::map<long, double> values;  ///< gamma -> z on ||x|| = p^{-gamma}
    /// Bound on |z(0, t) - z(p^{-gamma_max}, t)|.
    double tail_bound = 0.0;
};

inline HeatKernelEval heat_kernel_table(double t, long gamma_max, const BesselOrder& order) {
    detail::require_positive_time(t, "heat_kernel_table");
    HeatKernelEval e;
    e.t = t;
    for (long g = 0; g <= gamma_max; ++g) e.values[g] = z_closed(g, t, order);
    e.tail_bound = heat_tail_envelope(t, gamma_max + 1, order);
    return e;
}

/// integral of z_t: explicit shells gamma = 0..I, closed-form ball mass below. Equals e^{-t} - 1.
inline double z_mass(double t, const BesselOrder& order) {
    detail::require_positive_time(t, "z_mass");
    const long I = default_heat_truncation(t, order);
    double s = 0.0;
    for (long g = 0; g <= I; ++g) s += shell_measure(-g, order.context()).get_d() * z_closed(g, t, order);
    return s + z_ball_mass(I + 1, t, order);
}

/// Mass of Z_t = delta + z_t.
inline double distributional_mass(double t, const BesselOrder& order) { return 1.0 + z_mass(t, order); }

/**
 * z_{t1} * z_{t2} - (z_{t1+t2} - z_{t1} - z_{t2}) at ||x|| = p^{-gamma}, the
 * function-part form of Z_{t1} * Z_{t2} = Z_{t1+t2}. The left side is a
 * shell-sum convolution of the two radial profiles.
 */
inline double heat_convolution_check(double t1, double t2, long gamma, const BesselOrder& order) {
    const double lhs = radial_convolution(heat_profile(t1, order), heat_profile(t2, order), -gamma);
    const double rhs = z_closed(gamma, t1 + t2, order) - z_closed(gamma, t1, order) - z_closed(gamma, t2, order);
    return lhs - rhs;
}

inline ShellMultiplier heat_multiplier(double t, const BesselOrder& order) {
    return [t, order](long k) { return std::complex<double>(std::exp(-t * symbol_shell(k, order)), 0.0); };
}

/// <z_t, phi> = integral of (exp(-t symbol) - 1) F^{-1} phi, on the Fourier side.
inline std::complex<double> weak_pairing(double t, const BruhatSchwartzFunction& phi, const BesselOrder& order) {
    detail::require_positive_time(t, "weak_pairing");
    require_same(order.context(), phi.context());
    return spectral_pairing(phi, [t, order](long k) {
        return std::complex<double>(std::expm1(-t * symbol_shell(k, order)), 0.0);
    });
}

/// <Z_t, phi> = phi(0) + <z_t, phi>
inline std::complex<double> distributional_pairing(double t, const BruhatSchwartzFunction& phi,
                                                   const BesselOrder& order) {
    return phi(PAdicVector::zero(phi.context())).value() + weak_pairing(t, phi, order);
}

/// u(t) = F^{-1}[exp(-t symbol) F u0]: the semigroup generated by -J^alpha.
inline BruhatSchwartzFunction solve_cauchy(const BruhatSchwartzFunction& u0, double t, const BesselOrder& order) {
    if (t < 0) throw std::invalid_argument("solve_cauchy: t must be >= 0");
    require_same(order.context(), u0.context());
    if (t == 0) return canonicalize(u0);
    return apply_radial_multiplier(u0, heat_multiplier(t, order));
}

// --- inhomogeneous problem -------------------------------------------------

/// f(s) = function of the last step with time < s (left-continuous); the first step must be at time 0.
struct ForcingStep {
    double time;
    BruhatSchwartzFunction f;
};

struct EvolutionProblem {
    BruhatSchwartzFunction u0;
    std::vector<ForcingStep> forcing;
    double horizon = 1.0;
    int steps = 64;  ///< composite Simpson panels (even)

    void validate() const {
        if (!(horizon > 0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite and > 0");
        if (steps < 2 || steps % 2 != 0) throw std::invalid_argument("steps must be an even number >= 2");
        if (!forcing.empty()) {
            if (forcing.front().time != 0.0) throw std::invalid_argument("forcing schedule must start at time 0");
            for (size_t i = 0; i < forcing.size(); ++i) {
                require_same(u0.context(), forcing[i].f.context());
                if (i > 0 && !(forcing[i].time > forcing[i - 1].time)) {
                    throw std::invalid_argument("forcing times must be strictly increasing");
                }
            }
        }
    }

    /// Index of the forcing step active at time s.
    size_t forcing_index(double s) const {
        size_t k = 0;
        while (k + 1 < forcing.size() && forcing[k + 1].time < s) ++k;
        return k;
    }
};

struct MildSolution {
    double time;
    BruhatSchwartzFunction u;
    /// sup-norm Richardson estimate |S_N - S_2N| / 15 of the quadrature error.
    double error_estimate;
};

namespace detail {

/// Composite Simpson for integral_0^t T(t - s) f(s) ds with N panels.
inline BruhatSchwartzFunction duhamel_integral(const EvolutionProblem& pb, double t, int N, const BesselOrder& order) {
    BruhatSchwartzFunction acc(pb.u0.context());
    if (pb.forcing.empty() || t == 0.0) return acc;
    const double h = t / N;
    // nodes sampling the same forcing step share one combined multiplier
    std::map<size_t, std::vector<std::pair<double, double>>> groups;  // step -> (weight, lag)
    for (int j = 0; j <= N; ++j) {
        const double s = j * h;
        const double w = (j == 0 || j == N) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        groups[pb.forcing_index(s)].emplace_back(w * h / 3.0, t - s);
    }
    std::vector<Term> terms;
    for (const auto& [k, nodes] : groups) {
        auto part = apply_radial_multiplier(pb.forcing[k].f, [&nodes, &order](long shell) {
            const double sym = symbol_shell(shell, order);
            double m = 0.0;
            for (const auto& [w, lag] : nodes) m += w * std::exp(-lag * sym);
            return std::complex<double>(m, 0.0);
        });
        terms.insert(terms.end(), part.terms().begin(), part.terms().end());
    }
    return canonicalize(BruhatSchwartzFunction(pb.u0.context(), std::move(terms)));
}

}  // namespace detail

/// u(t) = T(t) u0 + integral_0^t T(t - s) f(s) ds at each requested time.
inline std::vector<MildSolution> duhamel(const EvolutionProblem& pb, const BesselOrder& order,
                                         const std::vector<double>& times) {
    pb.validate();
    require_same(order.context(), pb.u0.context());
    if (times.empty()) throw std::invalid_argument("duhamel: empty time list");
    std::vector<MildSolution> out;
    for (double t : times) {
        if (t < 0) throw std::invalid_argument("duhamel: negative time");
        if (t > pb.horizon) throw std::invalid_argument("duhamel: time beyond the horizon");
        const auto coarse = detail::duhamel_integral(pb, t, pb.steps, order);
        const auto fine = detail::duhamel_integral(pb, t, 2 * pb.steps, order);
        auto u = solve_cauchy(pb.u0, t, order) + coarse;
        out.push_back({t, std::move(u), sup_distance(coarse, fine) / 15.0});
    }
    return out;
}

}  // namespace padic
