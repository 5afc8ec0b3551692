#pragma once

/**
 * @file schwartz.hpp
 * @brief Bruhat-Schwartz test functions on Q_p^n.
 *
 * A test function is a finite combination  sum_j c_j 1_{B_j}  of ball
 * indicators. Coefficients are exact Gaussian rationals until an
 * irrational constant (a character value, an exponential) enters, after
 * which they are carried as complex doubles and flagged inexact.
 *
 * Canonical form: pairwise disjoint balls, no zero coefficients, sorted by
 * (radius, center). Overlaps are removed by splitting the larger of two
 * nested balls into its p^n children until nothing is nested.
 */

#include "padic_core.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <variant>

namespace padic {

/// Exact Gaussian rational, or an inexact complex double.
class Coefficient {
public:
    Coefficient() = default;
    Coefficient(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}
    Coefficient(long re) : re_(re) {}

    static Coefficient inexact(std::complex<double> z) {
        Coefficient c;
        c.exact_ = false;
        c.approx_ = z;
        return c;
    }

    bool is_exact() const { return exact_; }
    const Rational& re_exact() const { return re_; }
    const Rational& im_exact() const { return im_; }

    std::complex<double> value() const {
        return exact_ ? std::complex<double>(re_.get_d(), im_.get_d()) : approx_;
    }
    double real() const { return value().real(); }
    double abs() const { return std::abs(value()); }

    bool is_zero() const { return exact_ ? (re_ == 0 && im_ == 0) : approx_ == std::complex<double>{}; }
    bool is_real() const { return exact_ ? im_ == 0 : approx_.imag() == 0.0; }

    Coefficient conj() const {
        if (!exact_) return inexact(std::conj(approx_));
        return Coefficient(re_, -im_);
    }

    Coefficient operator-() const { return exact_ ? Coefficient(-re_, -im_) : inexact(-approx_); }

    friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
        if (a.exact_ && b.exact_) return Coefficient(a.re_ + b.re_, a.im_ + b.im_);
        return inexact(a.value() + b.value());
    }
    friend Coefficient operator-(const Coefficient& a, const Coefficient& b) { return a + (-b); }
    friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
        if (a.exact_ && b.exact_) {
            return Coefficient(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
        }
        return inexact(a.value() * b.value());
    }
    friend Coefficient operator*(const Coefficient& a, const Rational& s) {
        if (a.exact_) return Coefficient(a.re_ * s, a.im_ * s);
        return inexact(a.approx_ * s.get_d());
    }
    friend Coefficient operator*(const Coefficient& a, std::complex<double> s) {
        return inexact(a.value() * s);
    }
    friend Coefficient operator*(const Coefficient& a, double s) { return inexact(a.value() * s); }

    Coefficient& operator+=(const Coefficient& b) { return *this = *this + b; }

    /// Exact equality when both are exact; otherwise equality of the doubles.
    bool operator==(const Coefficient& o) const {
        if (exact_ && o.exact_) return re_ == o.re_ && im_ == o.im_;
        return value() == o.value();
    }

private:
    bool exact_ = true;
    Rational re_{0};
    Rational im_{0};
    std::complex<double> approx_{};
};

/// -1, 0, 1 comparison of the real parts, exact when both are exact.
inline int compare_real(const Coefficient& a, const Coefficient& b) {
    if (a.is_exact() && b.is_exact()) {
        const int c = cmp(a.re_exact(), b.re_exact());
        return (c > 0) - (c < 0);
    }
    const double x = a.real(), y = b.real();
    return (x > y) - (x < y);
}

/// Character value as a coefficient; exact at 1, -1, i, -i.
inline Coefficient to_coefficient(const CharacterValue& ch) {
    if (!ch.exact()) return Coefficient::inexact(ch.value);
    return Coefficient(Rational(static_cast<long>(ch.value.real())),
                       Rational(static_cast<long>(ch.value.imag())));
}

struct Term {
    Coefficient coef;
    Ball ball;
};

class BruhatSchwartzFunction;
BruhatSchwartzFunction canonicalize(const BruhatSchwartzFunction& f);

class BruhatSchwartzFunction {
public:
    explicit BruhatSchwartzFunction(PrimeContext ctx) : ctx_(ctx) {}
    BruhatSchwartzFunction(PrimeContext ctx, std::vector<Term> terms)
        : ctx_(ctx), terms_(std::move(terms)) {
        for (const auto& t : terms_) require_same(ctx_, t.ball.context());
    }

    static BruhatSchwartzFunction indicator(const Ball& b, Coefficient c = Coefficient(1)) {
        return BruhatSchwartzFunction(b.context(), {Term{std::move(c), b}});
    }
    /// Omega(||x||_p), the indicator of Z_p^n.
    static BruhatSchwartzFunction omega(PrimeContext ctx) { return indicator(Ball::unit(ctx)); }

    const PrimeContext& context() const { return ctx_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_canonical() const { return canonical_; }
    bool empty() const { return terms_.empty(); }

    bool is_exact() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef.is_exact(); });
    }
    bool is_real() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef.is_real(); });
    }

    /// Sum of the coefficients of the balls containing x.
    Coefficient operator()(const PAdicVector& x) const {
        require_same(ctx_, x.context());
        Coefficient s;
        for (const auto& t : terms_) {
            if (t.ball.contains(x)) s += t.coef;
        }
        return s;
    }

    /// Smallest radius exponent L with supp f contained in B_L(0); nullopt for the zero function.
    std::optional<long> support_radius() const {
        std::optional<long> L;
        for (const auto& t : terms_) {
            const NormExp c = t.ball.center_norm();
            long r = t.ball.radius_exp();
            if (!c.is_zero()) r = std::max(r, c.exponent());
            L = L ? std::max(*L, r) : r;
        }
        return L;
    }

    /// Constancy index: f is constant on every ball of radius p^l (min radius of the terms).
    std::optional<long> constancy_index() const {
        std::optional<long> l;
        for (const auto& t : terms_) l = l ? std::min(*l, t.ball.radius_exp()) : t.ball.radius_exp();
        return l;
    }

    BruhatSchwartzFunction reflected() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) out.push_back({t.coef, t.ball.reflected()});
        return canonicalize(BruhatSchwartzFunction(ctx_, std::move(out)));
    }

    friend BruhatSchwartzFunction operator+(const BruhatSchwartzFunction& a,
                                            const BruhatSchwartzFunction& b) {
        require_same(a.ctx_, b.ctx_);
        std::vector<Term> t = a.terms_;
        t.insert(t.end(), b.terms_.begin(), b.terms_.end());
        return canonicalize(BruhatSchwartzFunction(a.ctx_, std::move(t)));
    }
    friend BruhatSchwartzFunction operator*(const Coefficient& s, const BruhatSchwartzFunction& f) {
        std::vector<Term> t;
        t.reserve(f.terms_.size());
        for (const auto& x : f.terms_) t.push_back({x.coef * s, x.ball});
        return canonicalize(BruhatSchwartzFunction(f.ctx_, std::move(t)));
    }
    friend BruhatSchwartzFunction operator*(double s, const BruhatSchwartzFunction& f) {
        return Coefficient::inexact(s) * f;
    }
    friend BruhatSchwartzFunction operator-(const BruhatSchwartzFunction& a,
                                            const BruhatSchwartzFunction& b) {
        return a + Coefficient(-1) * b;
    }

private:
    friend BruhatSchwartzFunction canonicalize(const BruhatSchwartzFunction& f);

    PrimeContext ctx_;
    std::vector<Term> terms_;
    bool canonical_ = false;
};

using BallMap = std::map<Ball, Coefficient>;

inline BallMap merge_terms(const std::vector<Term>& terms) {
    BallMap m;
    for (const auto& t : terms) {
        auto [it, inserted] = m.try_emplace(t.ball, t.coef);
        if (!inserted) it->second += t.coef;
    }
    return m;
}

inline BruhatSchwartzFunction canonicalize(const BruhatSchwartzFunction& f) {
    if (f.canonical_) return f;
    BallMap pending = merge_terms(f.terms_);
    std::set<Ball> has_descendant;
    if (!pending.empty()) {
        const long max_r = pending.rbegin()->first.radius_exp();
        for (const auto& [b, c] : pending) {
            if (c.is_zero()) continue;
            for (long R = b.radius_exp() + 1; R <= max_r; ++R) {
                auto [it, fresh] = has_descendant.insert(b.ancestor(R));
                // everything above an already-recorded ancestor is recorded too
                if (!fresh) break;
            }
        }
    }

    std::vector<Term> out;
    while (!pending.empty()) {
        auto node = pending.extract(std::prev(pending.end()));
        if (node.mapped().is_zero()) continue;
        if (has_descendant.count(node.key()) == 0) {
            out.push_back({std::move(node.mapped()), std::move(node.key())});
            continue;
        }
        for (auto& child : node.key().children()) {
            auto [it, inserted] = pending.try_emplace(std::move(child), node.mapped());
            if (!inserted) it->second += node.mapped();
        }
    }
    std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.ball < b.ball; });
    BruhatSchwartzFunction g(f.ctx_, std::move(out));
    g.canonical_ = true;
    return g;
}

/// Evaluate f at x.
inline Coefficient evaluate(const BruhatSchwartzFunction& f, const PAdicVector& x) { return f(x); }

/// Integral of f against Haar measure: sum_j c_j p^{r_j n}.
inline Coefficient integral(const BruhatSchwartzFunction& f) {
    Coefficient s;
    for (const auto& t : f.terms()) s += t.coef * t.ball.measure();
    return s;
}

/**
 * L^2 pairing <f, g> = integral of f conj(g).
 *
 * Pairs of balls are nested or disjoint, so the overlap of two terms is the
 * smaller ball; nested pairs are found through ancestor lookups.
 */
inline Coefficient inner_product(const BruhatSchwartzFunction& f, const BruhatSchwartzFunction& g) {
    require_same(f.context(), g.context());
    const BallMap fm = merge_terms(f.terms());
    const BallMap gm = merge_terms(g.terms());
    if (fm.empty() || gm.empty()) return Coefficient();
    const bool exact = f.is_exact() && g.is_exact();
    Coefficient s;
    std::complex<long double> acc{};  // inexact inputs: extended-precision sum
    auto add = [&](const Coefficient& a, const Coefficient& b, const Ball& cell) {
        if (exact) {
            s += a * b.conj() * cell.measure();
            return;
        }
        const auto x = a.value(), y = b.value();
        const long double m = cell.measure().get_d();
        acc += std::complex<long double>(x.real(), x.imag()) * std::complex<long double>(y.real(), -y.imag()) * m;
    };
    const long f_max = fm.rbegin()->first.radius_exp();
    const long g_max = gm.rbegin()->first.radius_exp();
    for (const auto& [b, c] : fm) {
        for (long R = b.radius_exp(); R <= g_max; ++R) {
            auto it = gm.find(R == b.radius_exp() ? b : b.ancestor(R));
            if (it != gm.end()) add(c, it->second, b);
        }
    }
    for (const auto& [b, d] : gm) {
        for (long R = b.radius_exp() + 1; R <= f_max; ++R) {
            auto it = fm.find(b.ancestor(R));
            if (it != fm.end()) add(it->second, d, b);
        }
    }
    if (exact) return s;
    return Coefficient::inexact({static_cast<double>(acc.real()), static_cast<double>(acc.imag())});
}

inline double l2_norm(const BruhatSchwartzFunction& f) {
    return std::sqrt(std::max(0.0, inner_product(f, f).real()));
}

/// sup |f| over Q_p^n.
inline double sup_norm(const BruhatSchwartzFunction& f) {
    const auto g = canonicalize(f);
    double m = 0.0;
    for (const auto& t : g.terms()) m = std::max(m, t.coef.abs());
    return m;
}

/// sup |f - g|
inline double sup_distance(const BruhatSchwartzFunction& f, const BruhatSchwartzFunction& g) {
    return sup_norm(f - g);
}

/// Result of sup_and_argmax; `witness` empty means the sup 0 is attained off the support.
struct SupResult {
    std::optional<Ball> witness;
    Coefficient value;
    /// Every cell attaining the sup (empty when the sup is attained only off-support).
    std::vector<Ball> all_maximizers;
    /// True when the sup 0 is also attained at points outside the support.
    bool attained_off_support = false;
};

/**
 * Supremum over all of Q_p^n of a real test function. Points outside the
 * compact support contribute the value 0.
 */
inline SupResult sup_and_argmax(const BruhatSchwartzFunction& f) {
    const auto g = canonicalize(f);
    if (!g.is_real()) throw std::invalid_argument("sup_and_argmax: function has non-real coefficients");
    Coefficient best;  // 0, attained off-support
    for (const auto& t : g.terms()) {
        if (compare_real(t.coef, best) > 0) best = t.coef;
    }
    SupResult r;
    r.value = best;
    for (const auto& t : g.terms()) {
        if (compare_real(t.coef, best) == 0) r.all_maximizers.push_back(t.ball);
    }
    if (compare_real(best, Coefficient()) == 0) {
        r.attained_off_support = true;
    } else {
        r.witness = r.all_maximizers.front();
    }
    return r;
}

/// Disjoint cells of one common radius covering the support; f is constant on each.
struct CellPartition {
    long radius_exp = 0;
    std::vector<Term> cells;
};

inline CellPartition cell_partition(const BruhatSchwartzFunction& f, size_t max_cells = 1u << 20) {
    const auto g = canonicalize(f);
    CellPartition part;
    const auto l = g.constancy_index();
    if (!l) return part;
    part.radius_exp = *l;
    for (const auto& t : g.terms()) {
        std::vector<Ball> level{t.ball};
        while (level.front().radius_exp() > *l) {
            std::vector<Ball> next;
            for (const auto& b : level) {
                auto ch = b.children();
                next.insert(next.end(), ch.begin(), ch.end());
            }
            if (part.cells.size() + next.size() > max_cells) {
                throw std::length_error("cell_partition: more than " + std::to_string(max_cells) + " cells");
            }
            level = std::move(next);
        }
        for (auto& b : level) part.cells.push_back({t.coef, std::move(b)});
    }
    return part;
}

// --- random test functions -------------------------------------------------

struct RandomConfig {
    int max_terms = 8;
    long min_radius = -3;
    long max_radius = 3;
    /// Center coordinates are a/b with |a| <= p^e and 1 <= b <= p^e.
    int center_bound_exp = 4;
    bool complex_coefficients = false;
    /// Coefficients are k/100 with |k| <= 100 * coefficient_bound.
    long coefficient_bound = 10;
};

/// Uniform integer in [lo, hi] from a 64-bit engine, identical on every platform.
inline long uniform_int(std::mt19937_64& rng, long lo, long hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % span;
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + static_cast<long>(x % span);
}

inline Rational random_rational(std::mt19937_64& rng, long bound) {
    Rational q(Integer(uniform_int(rng, -bound, bound)), Integer(uniform_int(rng, 1, bound)));
    q.canonicalize();
    return q;
}

inline PAdicVector random_point(std::mt19937_64& rng, PrimeContext ctx, int bound_exp) {
    const long bound = ipow_p(ctx.p(), static_cast<unsigned long>(bound_exp)).get_si();
    std::vector<Rational> c;
    for (int i = 0; i < ctx.n(); ++i) c.push_back(random_rational(rng, bound));
    return PAdicVector(std::move(c), ctx);
}

/// Deterministic function of (seed, ctx, config); returned in canonical form.
inline BruhatSchwartzFunction random_test_function(uint64_t seed, PrimeContext ctx,
                                                   const RandomConfig& cfg = {}) {
    std::mt19937_64 rng(seed);
    const long nterms = uniform_int(rng, 1, cfg.max_terms);
    const long cb = 100 * cfg.coefficient_bound;
    std::vector<Term> terms;
    for (long i = 0; i < nterms; ++i) {
        const long r = uniform_int(rng, cfg.min_radius, cfg.max_radius);
        PAdicVector c = random_point(rng, ctx, cfg.center_bound_exp);
        Rational re(uniform_int(rng, -cb, cb), 100);
        Rational im(0);
        if (cfg.complex_coefficients) im = Rational(uniform_int(rng, -cb, cb), 100);
        re.canonicalize();
        im.canonicalize();
        terms.push_back({Coefficient(re, im), Ball(c, r)});
    }
    return canonicalize(BruhatSchwartzFunction(ctx, std::move(terms)));
}

}  // namespace padic
