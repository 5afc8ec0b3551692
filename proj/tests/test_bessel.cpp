#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace padic;

namespace {

Rational q(long a, long b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

struct Setting {
    long p;
    int n;
    double alpha;
};

const std::vector<Setting> kSettings = {{2, 1, 2.0}, {3, 1, 1.5}, {5, 1, 3.0},
                                        {2, 2, 2.5}, {3, 2, 4.0}, {5, 2, 3.5}};

BesselOrder order_of(const Setting& s) { return BesselOrder(s.alpha, PrimeContext(s.p, s.n)); }

RandomConfig complex_config() {
    RandomConfig cfg;
    cfg.complex_coefficients = true;
    return cfg;
}

}  // namespace

TEST(GammaP, Examples) {
    EXPECT_NEAR(gamma_p(2.0, PrimeContext(2, 1)), -4.0 / 3.0, 1e-15);
    EXPECT_EQ(gamma_p(1.0, PrimeContext(2, 1)), 0.0);
    EXPECT_EQ(gamma_p(2.0, PrimeContext(3, 2)), 0.0);
    for (const auto& s : kSettings) EXPECT_LT(gamma_p(s.alpha, PrimeContext(s.p, s.n)), 0.0);
    for (double a = 1.01; a < 9; a += 0.37) EXPECT_LT(gamma_p(a, PrimeContext(7, 1)), 0.0);
}

TEST(BesselOrder, RequiresAlphaAboveDimension) {
    EXPECT_THROW(BesselOrder(1.0, PrimeContext(2, 1)), std::invalid_argument);
    EXPECT_THROW(BesselOrder(1.5, PrimeContext(2, 2)), std::invalid_argument);
    try {
        BesselOrder(0.5, PrimeContext(3, 1));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("alpha > n"), std::string::npos);
    }
}

TEST(KAlpha, Examples) {
    const BesselOrder o(3.0, PrimeContext(2, 1));
    EXPECT_NEAR(k_alpha(NormExp::of(0), o), 7.0 / 8.0, 1e-15);
    EXPECT_EQ(k_alpha(NormExp::of(2), o), 0.0);
    EXPECT_EQ(k_alpha(NormExp::of(1), o), 0.0);
    // alpha = n: the log branch
    EXPECT_NEAR(k_alpha_value(1.0, PrimeContext(2, 1), NormExp::of(0)), 0.5, 1e-15);
    EXPECT_NEAR(k_alpha_value(2.0, PrimeContext(3, 2), NormExp::of(0)), 1.0 - 1.0 / 9.0, 1e-15);
    // below the unit sphere the kernel grows towards the origin
    EXPECT_GT(k_alpha(NormExp::of(-1), o), k_alpha(NormExp::of(0), o));
    EXPECT_TRUE(std::isfinite(k_alpha(NormExp::zero(), o)));
}

TEST(KAlpha, NonNegativeWithUnitMass) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        for (long g = 0; g < 40; ++g) EXPECT_GE(k_alpha(NormExp::of(-g), o), 0.0);
        EXPECT_NEAR(k_alpha_mass(o), 1.0, 1e-12);
        double prev = 0.0;
        for (long g = 0; g < 30; ++g) {
            const double m = k_alpha_partial_mass(o, g);
            EXPECT_GE(m, prev);
            EXPECT_LE(m, 1.0 + 1e-12);
            prev = m;
        }
    }
    EXPECT_NEAR(k_alpha_mass(BesselOrder(2.0, PrimeContext(2, 1))), 1.0, 1e-12);
    EXPECT_NEAR(k_alpha_mass(BesselOrder(3.5, PrimeContext(5, 2))), 1.0, 1e-12);
}

TEST(KAlpha, BallMassMatchesShellSum) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const PrimeContext ctx(s.p, s.n);
        for (long j = 0; j >= -3; --j) {
            double sum = 0.0;
            for (long k = j; k > -400; --k) sum += k_alpha(NormExp::of(k), o) * shell_measure(k, ctx).get_d();
            EXPECT_NEAR(k_alpha_ball_mass(o, j), sum, 1e-12);
        }
    }
}

TEST(Symbol, Examples) {
    const BesselOrder o(2.0, PrimeContext(2, 1));
    EXPECT_EQ(symbol(NormExp::zero(), o), 1.0);
    EXPECT_EQ(symbol(NormExp::of(0), o), 1.0);
    EXPECT_EQ(symbol(NormExp::of(-3), o), 1.0);
    EXPECT_NEAR(symbol(NormExp::of(2), o), 1.0 / 16.0, 1e-16);
    for (long m = 1; m < 10; ++m) {
        EXPECT_GT(symbol(NormExp::of(m), o), 0.0);
        EXPECT_LT(symbol(NormExp::of(m), o), 1.0);
    }
}

TEST(KhatVerify, DefectSmall) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        for (long m = -2; m <= 3; ++m) {
            EXPECT_LE(khat_verify(o, NormExp::of(m)), 1e-10) << m;
            EXPECT_LE(khat_verify(o, NormExp::of(m), 5), 1e-10) << m;
            EXPECT_EQ(khat_verify(o, NormExp::of(m), 0), khat_verify(o, NormExp::of(m), 7));
        }
        EXPECT_LE(khat_verify(o, NormExp::zero()), 1e-10);
    }
}

TEST(ApplyBessel, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto omega = BruhatSchwartzFunction::omega(o.context());
        EXPECT_LE(sup_distance(apply_bessel(o, omega), omega), 1e-15);
    }
    for (double alpha : {1.5, 2.0, 3.0}) {
        const BesselOrder o(alpha, PrimeContext(2, 1));
        const auto f = BruhatSchwartzFunction::indicator(Ball::centered(o.context(), -1));
        const double expect = (1.0 + std::pow(2.0, -alpha)) / 2.0;
        EXPECT_NEAR(apply_bessel(o, f)(PAdicVector::zero(o.context())).real(), expect, 1e-15);
    }
}

TEST(ApplyBessel, Composition) {
    const PrimeContext ctx(3, 1);
    const BesselOrder a(1.5, ctx), b(2.0, ctx), ab(3.5, ctx);
    for (uint64_t s = 0; s < 100; ++s) {
        const auto f = random_test_function(s, ctx, complex_config());
        EXPECT_LE(sup_distance(apply_bessel(a, apply_bessel(b, f)), apply_bessel(ab, f)), 1e-12);
    }
}

TEST(ApplyBesselConvolution, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto& ctx = o.context();
        const auto omega = BruhatSchwartzFunction::omega(ctx);
        EXPECT_NEAR(apply_bessel_convolution(o, omega, PAdicVector::zero(ctx)).real(), 1.0, 1e-12);
        EXPECT_EQ(apply_bessel_convolution(o, omega, far_point(ctx, 3)).abs(), 0.0);
    }
}

TEST(ApplyBesselConvolution, AgreesWithMultiplierRoute) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto& ctx = o.context();
        for (uint64_t seed = 0; seed < 50; ++seed) {
            const auto f = random_test_function(seed, ctx, complex_config());
            const auto Jf = apply_bessel(o, f);
            std::mt19937_64 rng(seed);
            for (int i = 0; i < 20; ++i) {
                // half the probes at term centers, where the function is most structured
                const PAdicVector x = (i % 2 == 0) ? random_point(rng, ctx, 3)
                                                   : f.terms()[static_cast<size_t>(i) % f.terms().size()].ball.center();
                EXPECT_LE(std::abs(Jf(x).value() - apply_bessel_convolution(o, f, x).value()), 1e-10);
            }
        }
    }
}

TEST(QuadraticForm, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        EXPECT_NEAR(quadratic_form(o, BruhatSchwartzFunction::omega(o.context())), -1.0, 1e-14);
        EXPECT_EQ(quadratic_form(o, BruhatSchwartzFunction(o.context())), 0.0);
    }
}

TEST(QuadraticForm, MatchesInnerProduct) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        for (uint64_t seed = 0; seed < 20; ++seed) {
            const auto f = random_test_function(seed, o.context(), complex_config());
            const double direct = -inner_product(apply_bessel(o, f), f).real();
            EXPECT_NEAR(quadratic_form(o, f), direct, 1e-10 * std::max(1.0, std::abs(direct)));
            EXPECT_LE(quadratic_form(o, f), 1e-12);
        }
    }
}

TEST(AdjointDefect, Hermitian) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto omega = BruhatSchwartzFunction::omega(o.context());
        EXPECT_EQ(std::abs(adjoint_defect(o, omega, omega)), 0.0);
        for (uint64_t seed = 0; seed < 50; ++seed) {
            const auto f = random_test_function(2 * seed, o.context(), complex_config());
            const auto g = random_test_function(2 * seed + 1, o.context(), complex_config());
            EXPECT_LE(std::abs(adjoint_defect(o, f, g)), 1e-12);
        }
    }
}

TEST(ContractionCheck, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto& ctx = o.context();
        EXPECT_NEAR(contraction_check(o, BruhatSchwartzFunction::omega(ctx)), 1.0, 1e-15);
        // F f supported on ||xi|| = p: f = 1_{B_{-1}} - p^{-n} Omega
        const auto f = BruhatSchwartzFunction::indicator(Ball::centered(ctx, -1)) -
                       BruhatSchwartzFunction::indicator(Ball::unit(ctx), Coefficient(pow_p(s.p, -s.n)));
        EXPECT_NEAR(contraction_check(o, f), std::pow(static_cast<double>(s.p), -s.alpha), 1e-14);
        EXPECT_THROW(contraction_check(o, BruhatSchwartzFunction(ctx)), std::invalid_argument);
        for (uint64_t seed = 0; seed < 50; ++seed) {
            EXPECT_LE(contraction_check(o, random_test_function(seed, ctx, complex_config())), 1.0 + 1e-12);
        }
    }
}

TEST(C0Dissipativity, Examples) {
    const BesselOrder o(2.0, PrimeContext(2, 1));
    const auto omega = BruhatSchwartzFunction::omega(o.context());
    const auto r = c0_dissipativity_check(o, omega, 1.0);
    EXPECT_NEAR(r.lhs, 2.0, 1e-15);
    EXPECT_NEAR(r.rhs, 1.0, 1e-15);
    EXPECT_TRUE(r.pass);
    const auto z = c0_dissipativity_check(o, BruhatSchwartzFunction(o.context()), 2.0);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    EXPECT_TRUE(z.pass);
    EXPECT_THROW(c0_dissipativity_check(o, omega, 0.0), std::invalid_argument);
}

// The sup-norm inequality does not hold for every real test function: this
// seeded case has ||lambda f + J f|| < lambda ||f||, by both evaluation routes.
TEST(C0Dissipativity, KnownCounterexample) {
    const BesselOrder o(2.0, PrimeContext(2, 1));
    const auto f = random_test_function(1157, o.context());
    const auto r = c0_dissipativity_check(o, f, 3.1);
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.rhs, 14.818, 1e-3);
    EXPECT_LT(r.lhs, r.rhs - 0.5);
    double conv_sup = 0.0;
    for (const auto& c : cell_partition(apply_bessel(o, f) + 3.1 * f).cells) {
        conv_sup = std::max(conv_sup, std::abs(apply_bessel_convolution(o, f, c.ball.center()).value() +
                                               3.1 * f(c.ball.center()).value()));
    }
    EXPECT_NEAR(conv_sup, r.lhs, 1e-10);
}

TEST(Pmp, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto omega = BruhatSchwartzFunction::omega(o.context());
        const auto a = pmp_check(o, omega);
        EXPECT_TRUE(a.pass);
        EXPECT_NEAR(a.operator_value, -1.0, 1e-15);
        ASSERT_TRUE(a.argmax.has_value());

        const auto b = pmp_check(o, Coefficient(-1) * omega);
        EXPECT_TRUE(b.pass);
        EXPECT_FALSE(b.argmax.has_value());
        EXPECT_EQ(b.sup_value, Coefficient(0));
        // every probe lies off Z_p^n, where J Omega vanishes
        for (const auto& pr : b.probes) {
            EXPECT_TRUE(omega(pr.point).is_zero());
            EXPECT_NEAR(pr.operator_value, 0.0, 1e-15);
        }
    }
}

// Negative mass within distance 1 of a maximizer makes (-J f)(x0) positive.
TEST(Pmp, KnownCounterexamples) {
    const BesselOrder o(2.0, PrimeContext(2, 1));
    const auto& ctx = o.context();
    const auto f1 = Coefficient(-1) * BruhatSchwartzFunction::indicator(Ball::centered(ctx, -1));
    const auto r1 = pmp_check(o, f1);
    EXPECT_FALSE(r1.pass);
    EXPECT_NEAR(r1.operator_value, 0.375, 1e-15);
    EXPECT_NEAR(-apply_bessel_convolution(o, f1, PAdicVector({q(1)}, ctx)).real(), 0.375, 1e-12);

    const auto f2 = BruhatSchwartzFunction::indicator(Ball::centered(ctx, -5), Coefficient(11)) -
                    BruhatSchwartzFunction::indicator(Ball::unit(ctx), Coefficient(10));
    const auto r2 = pmp_check(o, f2);
    EXPECT_FALSE(r2.pass);
    EXPECT_EQ(r2.sup_value, Coefficient(1));
    EXPECT_GT(r2.operator_value, 9.0);
    EXPECT_NEAR(-apply_bessel_convolution(o, f2, PAdicVector::zero(ctx)).real(), r2.operator_value, 1e-12);
}

TEST(Pmp, NonNegativeFunctionsPass) {
    // K_alpha >= 0, so f >= 0 gives J f >= 0 everywhere
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        for (uint64_t seed = 0; seed < 100; ++seed) {
            std::vector<Term> terms;
            const auto raw = random_test_function(seed, o.context());
            for (const auto& t : raw.terms())
                terms.push_back({Coefficient(Rational(abs(t.coef.re_exact()))), t.ball});
            const BruhatSchwartzFunction f(o.context(), terms);
            EXPECT_TRUE(pmp_check(o, f).pass) << seed;
        }
    }
}

TEST(Resolvent, Examples) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        const auto omega = BruhatSchwartzFunction::omega(o.context());
        EXPECT_LE(sup_distance(resolvent(o, 1.0, omega), 0.5 * omega), 1e-15);
        EXPECT_THROW(resolvent(o, 0.0, omega), std::invalid_argument);
        EXPECT_THROW(resolvent(o, -1.0, omega), std::invalid_argument);
    }
}

TEST(Resolvent, ResidualAndDecay) {
    for (const auto& s : kSettings) {
        const auto o = order_of(s);
        for (uint64_t seed = 0; seed < 30; ++seed) {
            const auto f = random_test_function(seed, o.context(), complex_config());
            for (double lambda : {0.1, 1.0, 10.0}) {
                const auto u = resolvent(o, lambda, f);
                EXPECT_LE(resolvent_residual(o, lambda, u, f), 1e-12 * std::max(1.0, sup_norm(f)));
            }
            // lambda ||u|| stays bounded as lambda grows
            double prev = 0.0;
            for (double lambda : {1e2, 1e3, 1e4}) {
                const double v = lambda * sup_norm(resolvent(o, lambda, f));
                if (prev > 0) {
                    EXPECT_NEAR(v, prev, 0.05 * prev);
                }
                prev = v;
            }
            EXPECT_NEAR(1e6 * sup_norm(resolvent(o, 1e6, f)), sup_norm(f), 1e-3 * sup_norm(f));
        }
    }
}

TEST(NegdefWitness, Examples) {
    const auto w = negdef_witness(BesselOrder(2.0, PrimeContext(2, 1)));
    EXPECT_EQ(w.shell, 1);
    EXPECT_NEAR(w.value, -0.5, 1e-15);
    const auto v = negdef_witness(BesselOrder(4.0, PrimeContext(3, 1)));
    EXPECT_EQ(v.shell, 1);
    EXPECT_NEAR(v.value, 2.0 / 81.0 - 1.0, 1e-15);
    for (const auto& s : kSettings) EXPECT_LT(negdef_witness(order_of(s)).value, 0.0);
    for (double a = 1.05; a < 6; a += 0.25) EXPECT_LT(negdef_witness(BesselOrder(a, PrimeContext(2, 1))).value, 0.0);
}
