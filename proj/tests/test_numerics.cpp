#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "indecide/errors.hpp"
#include "indecide/normal.hpp"
#include "indecide/random.hpp"
#include "indecide/root_find.hpp"

using namespace indecide;

TEST(NormalTail, KnownValues) {
    EXPECT_EQ(normal_tail(0.0), 0.5);
    // reference value from a 40-digit erfc evaluation
    EXPECT_NEAR(normal_tail(1.0), 0.15865525393145707, 1e-16);
    EXPECT_NEAR(normal_tail(-1.0), 1.0 - 0.15865525393145707, 1e-15);
    EXPECT_NEAR(normal_tail(5.0) / 2.8665157187919391e-07, 1.0, 1e-14);
}

TEST(NormalTail, Sandwich) {
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        const double phi = std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi);
        const double lower = phi * t / (1 + t * t);
        const double upper = phi / t;
        const double q = normal_tail(t);
        EXPECT_GE(q, lower) << t;
        EXPECT_LE(q, upper) << t;
    }
}

TEST(NormalTail, LogTailFarOut) {
    EXPECT_NEAR(log_normal_tail(1.0), std::log(0.15865525393145707), 1e-15);
    // Mills ratio asymptotics: log Q(t) ~ -t^2/2 - log(t sqrt(2 pi)) - 1/t^2
    const double t = 1e4;
    const double approx = -t * t / 2 - std::log(t * std::sqrt(2 * std::numbers::pi)) - 1 / (t * t);
    EXPECT_NEAR(log_normal_tail(t), approx, 1e-9 * std::abs(approx));
    EXPECT_TRUE(std::isfinite(log_normal_tail(1e100)));
}

TEST(NormalInterval, NarrowFarInterval) {
    EXPECT_NEAR(normal_interval(-1, 1), 1 - 2 * 0.15865525393145707, 1e-15);
    const double a = 30, b = 30 + 1e-6;
    // density at the midpoint times the width
    const double expect = std::exp(-0.5 * (a + 5e-7) * (a + 5e-7)) / std::sqrt(2 * std::numbers::pi) * (b - a);
    EXPECT_NEAR(normal_interval(a, b) / expect, 1.0, 1e-8);
}

TEST(NormalQuantile, Examples) {
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.15865525), 1.0, 1e-7);
    EXPECT_NEAR(normal_quantile(0.9), -1.2815515655446004, 1e-12);
    EXPECT_THROW(normal_quantile(0.0), DomainError);
    EXPECT_THROW(normal_quantile(1.0), DomainError);
    EXPECT_THROW(normal_quantile(std::nan("")), DomainError);
}

TEST(NormalQuantile, RoundTripOnCentiles) {
    for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        EXPECT_LE(std::abs(normal_tail(normal_quantile(p)) - p), 1e-10) << p;
    }
}

TEST(Bisect, Square) {
    RootFindConfig cfg;
    cfg.bracket = {0, 10};
    EXPECT_NEAR(bisect_monotone([](double x) { return x * x; }, 4.0, cfg), 2.0, 1e-12);
}

TEST(Bisect, IndecisionMassAtUnitSeparation) {
    RootFindConfig cfg;
    cfg.bracket = {0, 10};
    auto g = [](double t) { return normal_tail(1 - t) - normal_tail(1 + t); };
    const double t = bisect_monotone(g, 0.1, cfg);
    EXPECT_NEAR(g(t), 0.1, 1e-12);
}

TEST(Bisect, DecreasingAndErrors) {
    RootFindConfig cfg;
    cfg.bracket = {-3, 3};
    EXPECT_NEAR(bisect_monotone([](double x) { return -x * x * x; }, 1.0, cfg), -1.0, 1e-9);
    EXPECT_THROW(bisect_monotone([](double x) { return x; }, 5.0, cfg), BracketError);
    RootFindConfig bad;
    bad.bracket = {1, 1};
    EXPECT_THROW(bisect_monotone([](double x) { return x; }, 1.0, bad), DomainError);
}

TEST(Bisect, RandomPolynomials) {
    RandomStream rng(11, 0);
    for (int i = 0; i < 200; ++i) {
        // strictly increasing: a x^3 + b x with a, b > 0
        const double a = 0.1 + rng.uniform(), b = 0.1 + rng.uniform(), root = 4 * rng.uniform() - 2;
        auto f = [&](double x) { return a * x * x * x + b * x; };
        RootFindConfig cfg;
        cfg.bracket = {-5, 5};
        cfg.abs_tol = 1e-12;
        const double x = bisect_monotone(f, f(root), cfg);
        EXPECT_NEAR(x, root, 1e-10);
    }
}

TEST(Philox, KnownAnswers) {
    using A4 = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, DeterministicAndSeparated) {
    RandomStream a(1, 0), b(1, 0), c(1, 1), d(2, 0);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 1000; ++i) {
        va.push_back(a());
        vb.push_back(b());
        vc.push_back(c());
        vd.push_back(d());
    }
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vd);
    std::set<std::uint64_t> all(va.begin(), va.end());
    all.insert(vc.begin(), vc.end());
    EXPECT_EQ(all.size(), 2000u);
}

TEST(RandomStream, UniformAndNormalMoments) {
    RandomStream rng(5, 3);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.015);
}
