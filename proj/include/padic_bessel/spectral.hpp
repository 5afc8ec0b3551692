#pragma once

/**
 * @file spectral.hpp
 * @brief Fourier analysis on test functions and radial shell sums.
 *
 * Convention: (F f)(xi) = integral of chi_p(xi . x) f(x) d^n x, so that
 * F[1_{B_r(a)}](xi) = chi_p(xi . a) p^{rn} Omega(p^r ||xi||_p).
 */

#include "schwartz.hpp"

#include <functional>

namespace padic {

/// Cell centers of B_R(0) at radius p^S (S < R): vectors with digits at positions -R .. -S-1.
inline std::vector<PAdicVector> coset_representatives(const PrimeContext& ctx, long R, long S,
                                                      size_t max_cells) {
    std::vector<std::vector<Rational>> reps{std::vector<Rational>(static_cast<size_t>(ctx.n()), Rational(0))};
    for (long pos = -R; pos <= -S - 1; ++pos) {
        const Rational unit = pow_p(ctx.p(), pos);
        std::vector<std::vector<Rational>> next;
        if (reps.size() * static_cast<size_t>(ctx.pn()) > max_cells) {
            throw std::length_error("fourier: output needs more than " + std::to_string(max_cells) + " cells");
        }
        next.reserve(reps.size() * static_cast<size_t>(ctx.pn()));
        for (const auto& base : reps) {
            std::vector<long> digits(static_cast<size_t>(ctx.n()), 0);
            for (;;) {
                auto v = base;
                for (size_t i = 0; i < v.size(); ++i) v[i] += unit * digits[i];
                next.push_back(std::move(v));
                size_t i = 0;
                while (i < digits.size() && ++digits[i] == ctx.p()) digits[i++] = 0;
                if (i == digits.size()) break;
            }
        }
        reps = std::move(next);
    }
    std::vector<PAdicVector> out;
    out.reserve(reps.size());
    for (auto& v : reps) out.emplace_back(std::move(v), ctx);
    return out;
}

/**
 * Fourier transform of a test function, re-expressed as ball indicators.
 *
 * Each term c 1_{B_r(a)} maps to c p^{rn} chi_p(xi . a) on B_{-r}(0). The
 * phase is constant on cells of radius p^{-M}, ||a|| = p^M, so the output
 * ball is refined to that radius.
 */
inline BruhatSchwartzFunction fourier(const BruhatSchwartzFunction& f, size_t max_cells = 1u << 22) {
    const auto& ctx = f.context();
    const auto g = canonicalize(f);
    std::vector<Term> out;
    for (const auto& t : g.terms()) {
        const long r = t.ball.radius_exp();
        const Coefficient base = t.coef * t.ball.measure();
        const NormExp a_norm = t.ball.center_norm();
        if (a_norm.at_most(r)) {
            out.push_back({base, Ball::centered(ctx, -r)});
            continue;
        }
        const long M = a_norm.exponent();
        const PAdicVector a = t.ball.center();
        for (auto& xi : coset_representatives(ctx, -r, -M, max_cells)) {
            const Coefficient phase = to_coefficient(character(xi.dot(a), ctx.p()));
            out.push_back({base * phase, Ball(xi, -M)});
        }
        if (out.size() > max_cells) {
            throw std::length_error("fourier: output needs more than " + std::to_string(max_cells) + " cells");
        }
    }
    return canonicalize(BruhatSchwartzFunction(ctx, std::move(out)));
}

/// F^{-1} f (x) = (F f)(-x).
inline BruhatSchwartzFunction inverse_fourier(const BruhatSchwartzFunction& f, size_t max_cells = 1u << 22) {
    return fourier(f, max_cells).reflected();
}

/// <f, g> - <F f, F g>
inline std::complex<double> parseval_check(const BruhatSchwartzFunction& f, const BruhatSchwartzFunction& g) {
    return inner_product(f, g).value() - inner_product(fourier(f), fourier(g)).value();
}

// --- radial profiles -------------------------------------------------------

/// Geometric envelope |g(p^k)| <= C p^{k d}, valid for shells k > `from`.
struct DecayEnvelope {
    double C = 0.0;
    double d = 0.0;
    long from = 0;
};

/**
 * A function of the norm exponent only.
 *
 * `ball_mass(k)` must give the closed-form integral of g over B_k(0) for
 * k <= `deep_bound`; it stands in for the infinitely many small shells.
 */
struct RadialProfile {
    PrimeContext ctx;
    std::function<double(long)> value;
    std::function<double(long)> ball_mass;
    long deep_bound = 0;
    /// g vanishes on shells k > support_bound, when set.
    std::optional<long> support_bound;
    std::optional<DecayEnvelope> envelope;

    /// Value at x = 0: the limit of the shell values.
    std::function<double()> value_at_zero;

    double at(NormExp m) const {
        if (m.is_zero()) return value_at_zero ? value_at_zero() : value(std::numeric_limits<long>::min() / 2);
        return value(m.exponent());
    }
};

struct TruncatedValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

/**
 * Radial Fourier transform  sum over shells k <= J of g(p^k) * (shell
 * character integral at ||xi|| = p^m), with the shells at and below
 * min(J, -m) folded into the closed-form ball mass, plus a certified bound
 * on the shells k > J.
 */
inline TruncatedValue radial_transform(const RadialProfile& g, NormExp xi_norm, long J) {
    const auto& ctx = g.ctx;
    long top = J;
    if (g.support_bound) top = std::min(top, *g.support_bound);
    // below -m every shell integral is the full shell measure
    long fold = xi_norm.is_zero() ? top : std::min(top, -xi_norm.exponent());
    fold = std::min(fold, g.deep_bound);
    TruncatedValue out;
    for (long k = top; k > fold; --k) {
        const Rational w = shell_character_integral(k, xi_norm, ctx);
        if (w != 0) out.value += g.value(k) * w.get_d();
    }
    out.value += g.ball_mass(fold);

    const bool truncated = !g.support_bound || J < *g.support_bound;
    if (truncated) {
        if (!g.envelope) throw std::domain_error("radial_transform: divergent tail (no decay envelope)");
        const auto& e = *g.envelope;
        const double n = ctx.n();
        if (e.d >= -n) throw std::domain_error("radial_transform: divergent tail (decay exponent >= -n)");
        const long start = std::max(J, e.from) + 1;
        const double p = static_cast<double>(ctx.p());
        out.tail_bound = e.C * std::pow(p, start * (n + e.d)) * (1.0 - std::pow(p, -n)) / (1.0 - std::pow(p, n + e.d));
        if (J < e.from) {
            for (long k = J + 1; k <= e.from; ++k) out.tail_bound += std::abs(g.value(k)) * shell_measure(k, ctx).get_d();
        }
    }
    return out;
}

/**
 * Convolution of two radial profiles supported in B_0(0), at a point of
 * norm p^a (a <= 0). Uses the measures of {y : ||y|| = p^b, ||x - y|| = p^c}:
 *   b > a: c = b;   b < a: c = a;
 *   b = a: c < a has the full shell measure of c, c = a has p^{an}(1 - 2p^{-n}).
 */
inline double radial_convolution(const RadialProfile& g, const RadialProfile& h, long a) {
    const auto& ctx = g.ctx;
    require_same(ctx, h.ctx);
    if (a > 0) return 0.0;
    const long p = ctx.p();
    const int n = ctx.n();
    double s = 0.0;
    for (long b = 0; b > a; --b) s += g.value(b) * h.value(b) * shell_measure(b, ctx).get_d();
    if (a - 1 > g.deep_bound || a - 1 > h.deep_bound) {
        throw std::domain_error("radial_convolution: shell below the closed-form range");
    }
    s += h.value(a) * g.ball_mass(a - 1);
    const double equal_shell = dpow(p, static_cast<double>(a * n)) * (1.0 - 2.0 * dpow(p, -n));
    s += g.value(a) * (h.ball_mass(a - 1) + h.value(a) * equal_shell);
    return s;
}

// --- radial multipliers ----------------------------------------------------

/**
 * A Fourier multiplier that depends on ||xi|| only and is constant on the
 * unit ball: shell(0) is its value on ||xi|| <= 1, shell(k) on ||xi|| = p^k.
 */
using ShellMultiplier = std::function<std::complex<double>(long)>;

/**
 * F^{-1}[m F f] for a radial multiplier m constant on Z_p^n.
 *
 * For one term c 1_{B_r(a)} with R = -r > 0, write m 1_{B_R(0)} as
 * m(R) 1_{B_R} + sum_{k<R} (m(k) - m(k+1)) 1_{B_k}; inverse transforms of
 * centered balls are centered balls, and translation by a commutes with m.
 */
inline BruhatSchwartzFunction apply_radial_multiplier(const BruhatSchwartzFunction& f, const ShellMultiplier& m) {
    const auto& ctx = f.context();
    const auto g = canonicalize(f);
    std::vector<Term> out;
    for (const auto& t : g.terms()) {
        const long R = -t.ball.radius_exp();
        const PAdicVector a = t.ball.center();
        if (R <= 0) {
            out.push_back({t.coef * m(0), t.ball});
            continue;
        }
        out.push_back({t.coef * m(R), t.ball});
        std::complex<double> prev = m(0);
        const double scale = t.ball.measure().get_d();
        for (long k = 0; k < R; ++k) {
            const std::complex<double> next = m(k + 1);
            const double w = scale * dpow(ctx.p(), static_cast<double>(k * ctx.n()));
            out.push_back({t.coef * ((prev - next) * w), Ball(a, -k)});
            prev = next;
        }
    }
    return canonicalize(BruhatSchwartzFunction(ctx, std::move(out)));
}

/**
 * Integral over B_R(0) of m(||xi||) chi_p(xi . a), ||a|| = p^{a_norm}, for a
 * multiplier constant on the unit ball.
 */
inline std::complex<double> weighted_ball_character_integral(const ShellMultiplier& m, long R, NormExp a_norm,
                                                             const PrimeContext& ctx) {
    const long inner = std::min(R, 0L);
    std::complex<double> s = m(0) * ball_character_integral(inner, a_norm, ctx).get_d();
    for (long k = 1; k <= R; ++k) {
        const Rational w = shell_character_integral(k, a_norm, ctx);
        if (w != 0) s += m(k) * w.get_d();
    }
    return s;
}

/**
 * integral of m(||xi||) |F f(xi)|^2, evaluated term by term:
 * F f = sum_j c_j p^{r_j n} chi(xi . a_j) 1_{B_{-r_j}}, so each pair of terms
 * contributes a weighted character integral over the smaller ball.
 */
inline std::complex<double> spectral_energy(const BruhatSchwartzFunction& f, const ShellMultiplier& m) {
    const auto& ctx = f.context();
    const auto g = canonicalize(f);
    const auto& T = g.terms();
    std::complex<double> s{};
    for (size_t j = 0; j < T.size(); ++j) {
        const PAdicVector aj = T[j].ball.center();
        for (size_t k = 0; k < T.size(); ++k) {
            const long R = std::min(-T[j].ball.radius_exp(), -T[k].ball.radius_exp());
            const NormExp d = (aj - T[k].ball.center()).norm();
            const double vol = Rational(T[j].ball.measure() * T[k].ball.measure()).get_d();
            s += (T[j].coef * T[k].coef.conj()).value() * vol * weighted_ball_character_integral(m, R, d, ctx);
        }
    }
    return s;
}

/**
 * integral of m(||xi||) (F^{-1} f)(xi) d^n xi  =  <F^{-1}[m], f>  without conjugation.
 */
inline std::complex<double> spectral_pairing(const BruhatSchwartzFunction& f, const ShellMultiplier& m) {
    const auto& ctx = f.context();
    std::complex<double> s{};
    for (const auto& t : f.terms()) {
        s += t.coef.value() * t.ball.measure().get_d() *
             weighted_ball_character_integral(m, -t.ball.radius_exp(), t.ball.center_norm(), ctx);
    }
    return s;
}

}  // namespace padic
