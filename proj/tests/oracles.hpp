#pragma once

// Brute-force reference computations used to cross-check the library.

#include <padic_bessel/padic_bessel.hpp>

#include <cmath>

namespace padic::oracle {

/// {x}_p by searching a in [0, p^k) with x - a/p^k in Z_p.
inline Rational fractional_part_search(const Rational& x, long p) {
    const auto v = valuation(x, p);
    if (!v || *v >= 0) return Rational(0);
    const unsigned long k = static_cast<unsigned long>(-*v);
    const Integer pk = ipow_p(p, k);
    for (long a = 0; a < pk.get_si(); ++a) {
        Rational cand(Integer(a), pk);
        cand.canonicalize();
        const auto w = valuation(Rational(x - cand), p);
        if (!w || *w >= 0) return cand;
    }
    throw std::logic_error("fractional_part_search: not found");
}

/// Integral of chi(xi . x) over ||x|| = p^k, xi = (p^{-m}, 0, ...), by summing cells.
inline Rational shell_character_cells(long k, NormExp m, const PrimeContext& ctx) {
    if (m.is_zero() || -m.exponent() >= k) return shell_measure(k, ctx);
    std::vector<Rational> xc(static_cast<size_t>(ctx.n()), Rational(0));
    xc[0] = pow_p(ctx.p(), -m.exponent());
    const PAdicVector xi(xc, ctx);
    const long s = std::min(k - 1, -m.exponent());
    std::complex<double> chi_sum{};
    for (const auto& c : coset_representatives(ctx, k, s, 1u << 20)) {
        if (c.norm() != NormExp::of(k)) continue;
        chi_sum += character(xi.dot(c), ctx.p()).value;
    }
    // a sum of full orbits of roots of unity: an integer
    const double rounded = std::round(chi_sum.real());
    if (std::abs(chi_sum.real() - rounded) > 1e-6 || std::abs(chi_sum.imag()) > 1e-6) {
        throw std::logic_error("shell_character_cells: character sum is not an integer");
    }
    const Rational total(static_cast<long>(rounded));
    return total * ball_measure(s, ctx);
}

/// (F f)(xi) by summing chi(xi . c) f(c) vol over cells fine enough that the phase is constant.
inline std::complex<double> fourier_at(const BruhatSchwartzFunction& f, const PAdicVector& xi) {
    const auto g = canonicalize(f);
    if (g.empty()) return {};
    const NormExp xn = xi.norm();
    long s = *g.constancy_index();
    if (!xn.is_zero()) s = std::min(s, -xn.exponent());
    std::complex<double> sum{};
    for (const auto& t : g.terms()) {
        const long r = t.ball.radius_exp();
        for (const auto& off : coset_representatives(f.context(), r, s, 1u << 20)) {
            const PAdicVector c = t.ball.center() + off;
            sum += t.coef.value() * character(xi.dot(c), f.context().p()).value;
        }
    }
    return sum * ball_measure(s, f.context()).get_d();
}

/// u' = -u + 1, u(0) = 0.
inline double scalar_ode(double t) { return -std::expm1(-t); }

}  // namespace padic::oracle
