#pragma once

/**
 * @file padic_core.hpp
 * @brief Exact arithmetic on Q_p and Q_p^n over rational coordinates.
 *
 * Points are rationals (Q is dense in Q_p), so valuations, norms,
 * fractional parts and character phases are all exact integer computations.
 * Norms are carried as integer exponents: NormExp::of(m) means p^m.
 */

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace padic {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool is_prime(long p) {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0) return false;
    for (long d = 3; d * d <= p; d += 2) {
        if (p % d == 0) return false;
    }
    return true;
}

/// The prime p and the dimension n of Q_p^n.
class PrimeContext {
public:
    PrimeContext(long p, int n) : p_(p), n_(n) {
        if (!is_prime(p)) {
            throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
        }
        if (n < 1) {
            throw std::invalid_argument("dimension n must be >= 1");
        }
    }

    long p() const { return p_; }
    int n() const { return n_; }
    /// p^n, the number of child cosets of a ball.
    long pn() const {
        long r = 1;
        for (int i = 0; i < n_; ++i) r *= p_;
        return r;
    }

    bool operator==(const PrimeContext&) const = default;

private:
    long p_;
    int n_;
};

inline void require_same(const PrimeContext& a, const PrimeContext& b) {
    if (!(a == b)) {
        throw std::invalid_argument("context mismatch: (p=" + std::to_string(a.p()) + ", n=" +
                                    std::to_string(a.n()) + ") vs (p=" + std::to_string(b.p()) +
                                    ", n=" + std::to_string(b.n()) + ")");
    }
}

/// Exact p^e as a rational, e of either sign.
inline Rational pow_p(long p, long e) {
    Integer q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return Rational(q);
    Rational r(Integer(1), q);
    r.canonicalize();
    return r;
}

inline Integer ipow_p(long p, unsigned long e) {
    Integer q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), e);
    return q;
}

/// p^e as a double.
inline double dpow(long p, double e) { return std::exp(e * std::log(static_cast<double>(p))); }

/// Norm exponent: p^m, or the norm of zero.
class NormExp {
public:
    static NormExp zero() { return NormExp(true, 0); }
    static NormExp of(long m) { return NormExp(false, m); }

    bool is_zero() const { return zero_; }
    long exponent() const {
        if (zero_) throw std::logic_error("exponent() of the zero norm");
        return m_;
    }

    /// Exact comparison; zero is smaller than every p^m.
    std::strong_ordering operator<=>(const NormExp& o) const {
        if (zero_ || o.zero_) return o.zero_ <=> zero_;
        return m_ <=> o.m_;
    }
    bool operator==(const NormExp& o) const { return (*this <=> o) == 0; }

    /// ||x|| <= p^r
    bool at_most(long r) const { return zero_ || m_ <= r; }

    double value(long p) const { return zero_ ? 0.0 : dpow(p, static_cast<double>(m_)); }

private:
    NormExp(bool z, long m) : zero_(z), m_(m) {}
    bool zero_;
    long m_;
};

inline unsigned long multiplicity(const Integer& a, long p) {
    if (a == 0) return 0;
    Integer rest;
    Integer pp(p);
    return mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), pp.get_mpz_t());
}

/// p-adic order of x; nullopt stands for ord(0) = +inf.
inline std::optional<long> valuation(const Rational& x, long p) {
    if (x == 0) return std::nullopt;
    return static_cast<long>(multiplicity(x.get_num(), p)) -
           static_cast<long>(multiplicity(x.get_den(), p));
}

inline std::optional<long> valuation(const Rational& x, const PrimeContext& ctx) {
    return valuation(x, ctx.p());
}

inline NormExp scalar_norm(const Rational& x, long p) {
    auto v = valuation(x, p);
    return v ? NormExp::of(-*v) : NormExp::zero();
}

/// The fractional part {x}_p: the unique c/p^k in [0,1) with x - c/p^k in Z_p.
inline Rational fractional_part(const Rational& x, long p) {
    auto v = valuation(x, p);
    if (!v || *v >= 0) return Rational(0);
    const auto k = static_cast<unsigned long>(-*v);
    const Integer pk = ipow_p(p, k);
    // x = a / (p^k b) with p not dividing b
    Integer b = x.get_den() / pk;
    Integer binv;
    if (mpz_invert(binv.get_mpz_t(), b.get_mpz_t(), pk.get_mpz_t()) == 0) {
        throw std::logic_error("fractional_part: denominator not invertible");
    }
    Integer c = (x.get_num() * binv) % pk;
    if (c < 0) c += pk;
    Rational r(c, pk);
    r.canonicalize();
    return r;
}

/// Value of exp(2 pi i phase) for a phase in [0,1); exact at quarter turns.
inline std::complex<double> unit_root(const Rational& phase) {
    const Integer& den = phase.get_den();
    if (den == 1) return {1.0, 0.0};
    if (den == 2) return {-1.0, 0.0};
    if (den == 4) return phase.get_num() == 1 ? std::complex<double>{0.0, 1.0}
                                              : std::complex<double>{0.0, -1.0};
    // long double angle so the rounded values are within half an ulp
    Rational centered = phase > Rational(1, 2) ? Rational(phase - 1) : phase;
    const long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(centered.get_num().get_si()) /
                            static_cast<long double>(centered.get_den().get_d());
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

struct CharacterValue {
    Rational phase;  ///< {y}_p in [0,1)
    std::complex<double> value;
    /// True when the value is one of 1, -1, i, -i.
    bool exact() const { return phase.get_den() <= 4 && phase.get_den() != 3; }
};

/// The additive character chi_p(y) = exp(2 pi i {y}_p).
inline CharacterValue character(const Rational& y, long p) {
    Rational ph = fractional_part(y, p);
    auto v = unit_root(ph);
    return {std::move(ph), v};
}

/// An element of Q_p carrying its context.
class PAdicScalar {
public:
    PAdicScalar(Rational value, PrimeContext ctx) : value_(std::move(value)), ctx_(ctx) {
        value_.canonicalize();
    }

    const Rational& value() const { return value_; }
    const PrimeContext& context() const { return ctx_; }

    std::optional<long> valuation() const { return padic::valuation(value_, ctx_.p()); }
    NormExp norm() const { return scalar_norm(value_, ctx_.p()); }
    Rational fractional_part() const { return padic::fractional_part(value_, ctx_.p()); }
    CharacterValue character() const { return padic::character(value_, ctx_.p()); }

private:
    Rational value_;
    PrimeContext ctx_;
};

/// A point of Q_p^n with rational coordinates.
class PAdicVector {
public:
    PAdicVector(std::vector<Rational> coords, PrimeContext ctx)
        : coords_(std::move(coords)), ctx_(ctx) {
        if (static_cast<int>(coords_.size()) != ctx_.n()) {
            throw std::invalid_argument("vector has " + std::to_string(coords_.size()) +
                                        " coordinates, expected n = " + std::to_string(ctx_.n()));
        }
        for (auto& c : coords_) c.canonicalize();
    }

    static PAdicVector zero(PrimeContext ctx) {
        return PAdicVector(std::vector<Rational>(static_cast<size_t>(ctx.n()), Rational(0)), ctx);
    }

    const std::vector<Rational>& coords() const { return coords_; }
    const Rational& operator[](size_t i) const { return coords_[i]; }
    const PrimeContext& context() const { return ctx_; }
    size_t size() const { return coords_.size(); }

    /// ||x||_p = max_i |x_i|_p
    NormExp norm() const {
        NormExp best = NormExp::zero();
        for (const auto& c : coords_) best = std::max(best, scalar_norm(c, ctx_.p()));
        return best;
    }

    bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
    }

    PAdicVector operator+(const PAdicVector& o) const {
        require_same(ctx_, o.ctx_);
        std::vector<Rational> r(coords_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = coords_[i] + o.coords_[i];
        return PAdicVector(std::move(r), ctx_);
    }
    PAdicVector operator-(const PAdicVector& o) const {
        require_same(ctx_, o.ctx_);
        std::vector<Rational> r(coords_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = coords_[i] - o.coords_[i];
        return PAdicVector(std::move(r), ctx_);
    }
    PAdicVector operator-() const {
        std::vector<Rational> r(coords_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = -coords_[i];
        return PAdicVector(std::move(r), ctx_);
    }
    PAdicVector scaled(const Rational& s) const {
        std::vector<Rational> r(coords_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = coords_[i] * s;
        return PAdicVector(std::move(r), ctx_);
    }

    /// x . y = sum_i x_i y_i
    Rational dot(const PAdicVector& o) const {
        require_same(ctx_, o.ctx_);
        Rational s(0);
        for (size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * o.coords_[i];
        return s;
    }

    bool operator==(const PAdicVector& o) const { return ctx_ == o.ctx_ && coords_ == o.coords_; }

private:
    std::vector<Rational> coords_;
    PrimeContext ctx_;
};

/// Measure of the shell {||x|| = p^k}: p^{kn}(1 - p^{-n}).
inline Rational shell_measure(long k, const PrimeContext& ctx) {
    return pow_p(ctx.p(), k * ctx.n()) * (Rational(1) - pow_p(ctx.p(), -ctx.n()));
}

/// Measure of the ball {||x|| <= p^r}.
inline Rational ball_measure(long r, const PrimeContext& ctx) { return pow_p(ctx.p(), r * ctx.n()); }

/**
 * Integral of chi_p(xi . w) over the shell ||w|| = p^k, as a function of the
 * norm exponent m of xi:
 *
 *   p^{kn}(1 - p^{-n})   if m <= -k  (zero norm counts as m = -inf)
 *   -p^{(k-1)n}          if m == -k + 1
 *   0                    if m >= -k + 2
 */
inline Rational shell_character_integral(long k, NormExp xi_norm, const PrimeContext& ctx) {
    if (xi_norm.at_most(-k)) return shell_measure(k, ctx);
    if (xi_norm.exponent() == -k + 1) return -pow_p(ctx.p(), (k - 1) * ctx.n());
    return Rational(0);
}

/// Integral of chi_p(xi . w) over the ball ||w|| <= p^r: p^{rn} if ||xi|| <= p^{-r}, else 0.
inline Rational ball_character_integral(long r, NormExp xi_norm, const PrimeContext& ctx) {
    return xi_norm.at_most(-r) ? ball_measure(r, ctx) : Rational(0);
}

/// Representative of x modulo p^{-r} Z_p: the digits of x at positions below -r.
inline Rational reduce_mod_ball(const Rational& x, long r, long p) {
    // x mod p^{-r}Z_p  ==  p^{-r} * {p^r x}_p
    return pow_p(p, -r) * fractional_part(x * pow_p(p, r), p);
}

/**
 * The closed ball B_r(c) = {x : ||x - c|| <= p^r}.
 *
 * The center is stored as the canonical representative of c modulo
 * p^{-r} Z_p^n, so two balls are equal iff radius and center coincide.
 */
class Ball {
public:
    Ball(const PAdicVector& center, long radius_exp)
        : ctx_(center.context()), radius_(radius_exp), center_(canonical_center(center, radius_exp)) {}

    static Ball unit(PrimeContext ctx) { return Ball(PAdicVector::zero(ctx), 0); }
    static Ball centered(PrimeContext ctx, long r) { return Ball(PAdicVector::zero(ctx), r); }

    const PrimeContext& context() const { return ctx_; }
    long radius_exp() const { return radius_; }
    const std::vector<Rational>& center_coords() const { return center_; }
    PAdicVector center() const { return PAdicVector(center_, ctx_); }

    bool contains(const PAdicVector& x) const {
        require_same(ctx_, x.context());
        for (size_t i = 0; i < center_.size(); ++i) {
            if (!scalar_norm(x[i] - center_[i], ctx_.p()).at_most(radius_)) return false;
        }
        return true;
    }

    /// True if `inner` is a (not necessarily strict) sub-ball of this ball.
    bool contains(const Ball& inner) const {
        require_same(ctx_, inner.ctx_);
        if (inner.radius_ > radius_) return false;
        for (size_t i = 0; i < center_.size(); ++i) {
            if (!scalar_norm(inner.center_[i] - center_[i], ctx_.p()).at_most(radius_)) return false;
        }
        return true;
    }

    /// Ultrametric dichotomy: two balls are nested or disjoint.
    bool intersects(const Ball& o) const { return contains(o) || o.contains(*this); }

    /// The enclosing ball of radius p^R (R >= radius).
    Ball ancestor(long R) const {
        Ball b = *this;
        b.radius_ = R;
        for (auto& c : b.center_) c = reduce_mod_ball(c, R, ctx_.p());
        return b;
    }

    /// The p^n sub-balls of radius p^{r-1}, in digit order.
    std::vector<Ball> children() const {
        const long p = ctx_.p();
        const int n = ctx_.n();
        const Rational step = pow_p(p, -radius_);
        std::vector<Ball> out;
        out.reserve(static_cast<size_t>(ctx_.pn()));
        std::vector<long> digits(static_cast<size_t>(n), 0);
        for (;;) {
            Ball b = *this;
            b.radius_ = radius_ - 1;
            for (int i = 0; i < n; ++i) {
                b.center_[static_cast<size_t>(i)] += step * digits[static_cast<size_t>(i)];
                b.center_[static_cast<size_t>(i)].canonicalize();
            }
            out.push_back(std::move(b));
            int i = 0;
            while (i < n && ++digits[static_cast<size_t>(i)] == p) digits[static_cast<size_t>(i++)] = 0;
            if (i == n) break;
        }
        return out;
    }

    Ball reflected() const {
        std::vector<Rational> c(center_.size());
        for (size_t i = 0; i < c.size(); ++i) c[i] = -center_[i];
        return Ball(PAdicVector(std::move(c), ctx_), radius_);
    }

    Rational measure() const { return ball_measure(radius_, ctx_); }

    /// Norm of the points of the ball when 0 is not in it; p^r bound otherwise.
    NormExp center_norm() const { return PAdicVector(center_, ctx_).norm(); }
    bool contains_origin() const { return center_norm().at_most(radius_); }

    std::strong_ordering operator<=>(const Ball& o) const {
        if (auto c = radius_ <=> o.radius_; c != 0) return c;
        for (size_t i = 0; i < center_.size(); ++i) {
            const int s = cmp(center_[i], o.center_[i]);
            if (s != 0) return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }
    bool operator==(const Ball& o) const { return ctx_ == o.ctx_ && (*this <=> o) == 0; }

private:
    static std::vector<Rational> canonical_center(const PAdicVector& c, long r) {
        std::vector<Rational> out(c.size());
        for (size_t i = 0; i < out.size(); ++i) out[i] = reduce_mod_ball(c[i], r, c.context().p());
        return out;
    }

    PrimeContext ctx_;
    long radius_;
    std::vector<Rational> center_;
};

/// Lowest-terms text: "a" or "a/b".
inline std::string to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_str();
}

}  // namespace padic
