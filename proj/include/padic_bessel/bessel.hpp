#pragma once

/**
 * @file bessel.hpp
 * @brief The Bessel potential J^alpha on Q_p^n and its verification battery.
 *
 * J^alpha is the Fourier multiplier with symbol (max{1, ||xi||_p})^{-alpha};
 * equivalently convolution with the radial kernel
 *
 *   K_alpha(x) = (||x||^{alpha-n} - p^{alpha-n}) Omega(||x||) / Gamma_p^n(alpha),
 *   Gamma_p^n(alpha) = (1 - p^{alpha-n}) / (1 - p^{-alpha}).
 *
 * Only real alpha > n is supported as an operator order.
 */

#include "spectral.hpp"

namespace padic {

/// Gamma_p^n(alpha) = (1 - p^{alpha-n}) / (1 - p^{-alpha}).
inline double gamma_p(double alpha, const PrimeContext& ctx) {
    if (alpha == 0.0) throw std::domain_error("gamma_p: alpha must be nonzero");
    const long p = ctx.p();
    return -std::expm1((alpha - ctx.n()) * std::log(static_cast<double>(p))) /
           -std::expm1(-alpha * std::log(static_cast<double>(p)));
}

class BesselOrder {
public:
    BesselOrder(double alpha, PrimeContext ctx) : alpha_(alpha), ctx_(ctx) {
        if (!(alpha > ctx.n())) {
            throw std::invalid_argument("alpha must satisfy alpha > n (got alpha = " + std::to_string(alpha) +
                                        ", n = " + std::to_string(ctx.n()) + ")");
        }
    }
    double alpha() const { return alpha_; }
    const PrimeContext& context() const { return ctx_; }

private:
    double alpha_;
    PrimeContext ctx_;
};

/**
 * K_alpha on the shell ||x|| = p^m (zero norm gives the value at the origin).
 * Valid for any alpha > 0; alpha = n uses the logarithmic branch.
 */
inline double k_alpha_value(double alpha, const PrimeContext& ctx, NormExp m) {
    const long p = ctx.p();
    const int n = ctx.n();
    if (!m.is_zero() && m.exponent() >= 1) return 0.0;
    if (alpha == n) {
        if (m.is_zero()) return std::numeric_limits<double>::infinity();
        return (1.0 - dpow(p, -n)) * static_cast<double>(1 - m.exponent());
    }
    const double near = m.is_zero() ? 0.0 : dpow(p, m.exponent() * (alpha - n));
    return (near - dpow(p, alpha - n)) / gamma_p(alpha, ctx);
}

inline double k_alpha(NormExp m, const BesselOrder& order) {
    return k_alpha_value(order.alpha(), order.context(), m);
}

/// Closed-form integral of K_alpha over B_j(0), j <= 0.
inline double k_alpha_ball_mass(const BesselOrder& order, long j) {
    const auto& ctx = order.context();
    const long p = ctx.p();
    const int n = ctx.n();
    const double a = order.alpha();
    if (j > 0) j = 0;
    // sum_{k<=j} p^{k alpha}(1-p^{-n}) = (1-p^{-n}) p^{j alpha}/(1-p^{-alpha}),  sum_{k<=j} p^{kn}(1-p^{-n}) = p^{jn}
    const double near = (1.0 - dpow(p, -n)) * dpow(p, j * a) / (1.0 - dpow(p, -a));
    return (near - dpow(p, a - n) * dpow(p, static_cast<double>(j * n))) / gamma_p(a, ctx);
}

/// sum_{gamma=0}^{gamma_max} shell_measure(-gamma) K_alpha(p^{-gamma}).
inline double k_alpha_partial_mass(const BesselOrder& order, long gamma_max) {
    double s = 0.0;
    for (long g = 0; g <= gamma_max; ++g) {
        s += shell_measure(-g, order.context()).get_d() * k_alpha(NormExp::of(-g), order);
    }
    return s;
}

/// Total mass of K_alpha: explicit shells down to `depth`, closed form below.
inline double k_alpha_mass(const BesselOrder& order, long depth = 40) {
    return k_alpha_partial_mass(order, depth) + k_alpha_ball_mass(order, -depth - 1);
}

/// (max{1, ||xi||})^{-alpha}
inline double symbol(NormExp xi, const BesselOrder& order) {
    if (xi.at_most(0)) return 1.0;
    return dpow(order.context().p(), -static_cast<double>(xi.exponent()) * order.alpha());
}

inline double symbol_shell(long k, const BesselOrder& order) {
    return k <= 0 ? 1.0 : symbol(NormExp::of(k), order);
}

inline RadialProfile bessel_kernel_profile(const BesselOrder& order) {
    RadialProfile g{order.context(), {}, {}, 0, 0L, std::nullopt, {}};
    g.value = [order](long m) { return k_alpha(NormExp::of(m), order); };
    g.ball_mass = [order](long j) { return k_alpha_ball_mass(order, j); };
    g.value_at_zero = [order] { return k_alpha(NormExp::zero(), order); };
    return g;
}

/// |radial transform of K_alpha at ||xi|| = p^m  -  symbol(m)|
inline double khat_verify(const BesselOrder& order, NormExp xi, long truncation = 0) {
    const auto t = radial_transform(bessel_kernel_profile(order), xi, truncation);
    return std::abs(t.value - symbol(xi, order)) + t.tail_bound;
}

inline ShellMultiplier bessel_multiplier(const BesselOrder& order) {
    return [order](long k) { return std::complex<double>(symbol_shell(k, order), 0.0); };
}

/// J^alpha f = F^{-1}[symbol F f].
inline BruhatSchwartzFunction apply_bessel(const BesselOrder& order, const BruhatSchwartzFunction& f) {
    require_same(order.context(), f.context());
    return apply_radial_multiplier(f, bessel_multiplier(order));
}

/**
 * (K_alpha * f)(x) by shells of y: explicit shells from ||y|| = 1 down to
 * the constancy index l of f, then f(x - y) = f(x) on B_l(0) and the rest
 * of the kernel mass is taken in closed form.
 */
inline Coefficient apply_bessel_convolution(const BesselOrder& order, const BruhatSchwartzFunction& f,
                                            const PAdicVector& x) {
    const auto& ctx = order.context();
    require_same(ctx, f.context());
    const auto g = canonicalize(f);
    const auto l = g.constancy_index();
    if (!l) return Coefficient::inexact(0.0);
    const long stop = std::min(*l, 0L);
    std::complex<double> s{};
    for (const auto& t : g.terms()) {
        // shells of y with x - y in B_r(a), i.e. y in B_r(x - a)
        const long r = t.ball.radius_exp();
        const NormExp c = (x - t.ball.center()).norm();
        const bool has_origin = c.at_most(r);
        double mass = 0.0;
        for (long k = 0; k > stop; --k) {
            double meas = 0.0;
            if (has_origin) {
                if (k <= r) meas = shell_measure(k, ctx).get_d();
            } else if (c.exponent() == k) {
                meas = t.ball.measure().get_d();
            }
            mass += k_alpha(NormExp::of(k), order) * meas;
        }
        s += t.coef.value() * mass;
    }
    s += g(x).value() * k_alpha_ball_mass(order, stop);
    return Coefficient::inexact(s);
}

/// <-J^alpha f, f> = -integral symbol |F f|^2, evaluated on the Fourier side.
inline double quadratic_form(const BesselOrder& order, const BruhatSchwartzFunction& f) {
    return -spectral_energy(f, bessel_multiplier(order)).real();
}

/// <-J f, g> - <f, -J g>
inline std::complex<double> adjoint_defect(const BesselOrder& order, const BruhatSchwartzFunction& f,
                                           const BruhatSchwartzFunction& g) {
    const auto Jf = apply_bessel(order, f);
    const auto Jg = apply_bessel(order, g);
    return -inner_product(Jf, g).value() + inner_product(f, Jg).value();
}

/// ||J^alpha f||_2 / ||f||_2
inline double contraction_check(const BesselOrder& order, const BruhatSchwartzFunction& f) {
    const double nf = l2_norm(f);
    if (nf == 0.0) throw std::invalid_argument("contraction_check: zero input");
    return l2_norm(apply_bessel(order, f)) / nf;
}

struct DissipativityReport {
    double lhs = 0.0;  ///< ||lambda f + J f||_inf
    double rhs = 0.0;  ///< lambda ||f||_inf
    bool pass = false;
};

/// ||lambda f - A f||_inf >= lambda ||f||_inf with A = -J^alpha.
inline DissipativityReport c0_dissipativity_check(const BesselOrder& order, const BruhatSchwartzFunction& f,
                                                  double lambda, double tol = 1e-12) {
    if (!(lambda > 0)) throw std::invalid_argument("c0_dissipativity_check: lambda must be > 0");
    DissipativityReport r;
    r.lhs = sup_norm(apply_bessel(order, f) + lambda * f);
    r.rhs = lambda * sup_norm(f);
    r.pass = r.lhs >= r.rhs - tol * std::max(1.0, r.rhs);
    return r;
}

struct PmpProbe {
    PAdicVector point;
    double operator_value;  ///< (-J^alpha f)(point)
};

struct PmpReport {
    std::optional<Ball> argmax;
    Coefficient sup_value;
    /// Largest (-J^alpha f)(x0) over the probed maximizers.
    double operator_value = 0.0;
    std::vector<PmpProbe> probes;
    bool pass = false;
};

/// A point of Q_p^n outside B_L(0): first coordinate p^{-L-1}.
inline PAdicVector far_point(const PrimeContext& ctx, long L) {
    std::vector<Rational> c(static_cast<size_t>(ctx.n()), Rational(0));
    c[0] = pow_p(ctx.p(), -L - 1);
    return PAdicVector(std::move(c), ctx);
}

/**
 * Positive maximum principle at the maximizers of f: every cell attaining
 * sup f = f(x0) >= 0 is probed at its center. When the sup 0 is attained off
 * the support, one off-support point is probed inside Z_p^n (if Z_p^n is not
 * covered by supp f) and one outside every ball in play.
 */
inline PmpReport pmp_check(const BesselOrder& order, const BruhatSchwartzFunction& f, double tol = 1e-12) {
    const auto& ctx = order.context();
    const auto g = canonicalize(f);
    const auto sup = sup_and_argmax(g);
    const auto Jf = apply_bessel(order, g);
    PmpReport rep;
    rep.argmax = sup.witness;
    rep.sup_value = sup.value;
    auto probe = [&](const PAdicVector& x) {
        rep.probes.push_back({x, -Jf(x).real()});
    };
    for (const auto& b : sup.all_maximizers) probe(b.center());
    if (sup.attained_off_support) {
        // a cell of Z_p^n at the finest scale in play, away from supp f
        const long l = std::min(g.constancy_index().value_or(0), 0L);
        const auto cells = coset_representatives(ctx, 0, l, 1u << 16);
        for (const auto& x : cells) {
            if (std::none_of(g.terms().begin(), g.terms().end(),
                             [&](const Term& t) { return t.ball.contains(x); })) {
                probe(x);
                break;
            }
        }
        probe(far_point(ctx, std::max(g.support_radius().value_or(0), 0L) + 1));
    }
    rep.operator_value = -std::numeric_limits<double>::infinity();
    for (const auto& pr : rep.probes) rep.operator_value = std::max(rep.operator_value, pr.operator_value);
    rep.pass = rep.operator_value <= tol;
    return rep;
}

/// u = F^{-1}[F f / (lambda + symbol)], the solution of (lambda + J^alpha) u = f.
inline BruhatSchwartzFunction resolvent(const BesselOrder& order, double lambda, const BruhatSchwartzFunction& f) {
    if (!(lambda > 0)) throw std::invalid_argument("resolvent: lambda must be > 0");
    require_same(order.context(), f.context());
    return apply_radial_multiplier(
        f, [order, lambda](long k) { return std::complex<double>(1.0 / (lambda + symbol_shell(k, order)), 0.0); });
}

/// sup |(lambda + J^alpha) u - f|
inline double resolvent_residual(const BesselOrder& order, double lambda, const BruhatSchwartzFunction& u,
                                 const BruhatSchwartzFunction& f) {
    return sup_norm(lambda * u + apply_bessel(order, u) - f);
}

struct NegdefWitness {
    long shell;
    double value;  ///< 2 symbol(p^m) - symbol(0)
};

/// The smallest shell m >= 1 on which 2 symbol(p^m) - symbol(0) < 0.
inline NegdefWitness negdef_witness(const BesselOrder& order) {
    for (long m = 1; m < 4096; ++m) {
        const double v = 2.0 * symbol(NormExp::of(m), order) - symbol(NormExp::zero(), order);
        if (v < 0) return {m, v};
    }
    throw std::logic_error("negdef_witness: no violating shell found");
}

}  // namespace padic
