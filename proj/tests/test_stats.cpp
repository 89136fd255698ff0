#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgov/stats.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace kgov;

// ── independent oracle ────────────────────────────────────────────────
// Brute-force route for every quantity the stats module produces: means and
// variances by direct summation, p-values by adaptive Simpson quadrature of
// the beta integral under the substitution u = sin^2(theta), which removes
// both endpoint singularities. Shares nothing with the continued-fraction
// implementation.

namespace oracle {

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double simpson(double (*f)(double, double, double), double a, double b, double lo, double hi,
               double flo, double fmid, double fhi, double eps, int depth) {
    double mid = (lo + hi) / 2.0;
    double lmid = (lo + mid) / 2.0;
    double rmid = (mid + hi) / 2.0;
    double fl = f(lmid, a, b);
    double fr = f(rmid, a, b);
    double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, b, lo, mid, flo, fl, fmid, eps / 2.0, depth - 1) +
           simpson(f, a, b, mid, hi, fmid, fr, fhi, eps / 2.0, depth - 1);
}

double beta_integrand(double theta, double a, double b) {
    // 2 sin^(2a-1) cos^(2b-1)
    double s = std::sin(theta);
    double c = std::cos(theta);
    return 2.0 * std::pow(s, 2.0 * a - 1.0) * std::pow(c, 2.0 * b - 1.0);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double upper = std::asin(std::sqrt(x));
    double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double flo = beta_integrand(1e-300, a, b);
    double fmid = beta_integrand(upper / 2.0, a, b);
    double fhi = beta_integrand(upper, a, b);
    double integral =
        simpson(beta_integrand, a, b, 0.0, upper, flo, fmid, fhi, 1e-14, 45);
    return integral / std::exp(log_beta);
}

struct Welch {
    double t, df, p;
};

Welch welch(const std::vector<double>& xs, const std::vector<double>& ys) {
    double na = static_cast<double>(xs.size());
    double nb = static_cast<double>(ys.size());
    double va = variance(xs);
    double vb = variance(ys);
    Welch r{};
    double se2 = va / na + vb / nb;
    r.t = (mean(xs) - mean(ys)) / std::sqrt(se2);
    double denom = va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0));
    r.df = se2 * se2 / denom;
    r.p = regularized_incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    return r;
}

struct FRatio {
    double f, p;
};

FRatio f_ratio(const std::vector<double>& xs, const std::vector<double>& ys) {
    double d1 = static_cast<double>(xs.size()) - 1.0;
    double d2 = static_cast<double>(ys.size()) - 1.0;
    FRatio r{};
    r.f = variance(xs) / variance(ys);
    double x = d1 * r.f / (d1 * r.f + d2);
    r.p = regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, x);
    return r;
}

} // namespace oracle

namespace {

// five values with exactly this sample mean and sample standard deviation
std::vector<double> synthetic_group(double m, double sd) {
    return {m - sd, m - sd, m, m + sd, m + sd};
}

} // namespace

TEST_CASE("mean and sample deviation use the n-1 denominator") {
    std::vector<double> xs{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    CHECK(stats::mean(xs) == doctest::Approx(5.0));
    CHECK(stats::sample_variance(xs) == doctest::Approx(32.0 / 7.0));

    auto g = synthetic_group(6.45, 0.79);
    CHECK(stats::mean(g) == doctest::Approx(6.45).epsilon(1e-12));
    CHECK(stats::sample_std(g) == doctest::Approx(0.79).epsilon(1e-12));
}

TEST_CASE("welch: identical nonconstant samples give t = 0, p = 1") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    auto r = stats::welch_t_test(xs, xs);
    CHECK(!r.degenerate);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("welch: equal variances and equal n reduce df to 2n-2") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b{11.0, 12.0, 13.0, 14.0, 15.0}; // same spread, shifted
    auto r = stats::welch_t_test(a, b);
    CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("welch: both variances zero is flagged, not divided") {
    std::vector<double> a{3.0, 3.0, 3.0};
    std::vector<double> b{5.0, 5.0};
    auto r = stats::welch_t_test(a, b);
    CHECK(r.degenerate);
    CHECK(std::isnan(r.t));
}

TEST_CASE("f test: identical samples give F = 1; df follow group sizes") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0, 5.0};
    auto r = stats::f_variance_test(xs, xs);
    CHECK(!r.degenerate);
    CHECK(r.f == doctest::Approx(1.0));
    CHECK(r.df1 == 4);
    CHECK(r.df2 == 4);
}

TEST_CASE("f test: lower-tail p for a strong variance reduction") {
    //变iance ratio 0.15 with df (4,4) sits at p ~ 0.047 on the lower tail
    double p = stats::f_lower_tail_p(0.15, 4, 4);
    CHECK(p == doctest::Approx(0.0466).epsilon(2e-2));
    CHECK(p < 0.05);
}

TEST_CASE("reported-shape groups: t recomputes near 0.72, not 1.60") {
    // groups constructed to carry exactly the reported means and deviations
    auto b = synthetic_group(6.45, 0.79);
    auto c = synthetic_group(6.73, 0.36);
    auto r = stats::welch_t_test(c, b);
    CHECK(r.t == doctest::Approx(0.7212).epsilon(1e-3));
    CHECK(r.df == doctest::Approx(5.593).epsilon(1e-3));
    CHECK(r.t < 1.0); // nowhere near 1.60

    auto f = stats::f_variance_test(c, b);
    CHECK(f.f == doctest::Approx((0.36 * 0.36) / (0.79 * 0.79)).epsilon(1e-9));
    CHECK(f.df1 == 4);
    CHECK(f.df2 == 4);
    // I_x(2,2) = 3x^2 - 2x^3 at x = 4F/(4F+4)
    double x = 4.0 * f.f / (4.0 * f.f + 4.0);
    CHECK(f.p == doctest::Approx(3.0 * x * x - 2.0 * x * x * x).epsilon(1e-9));
}

TEST_CASE("20 randomized pairs agree with the brute-force oracle to 1e-9") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_int_distribution<int> size(3, 12);

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(static_cast<size_t>(size(rng)));
        std::vector<double> b(static_cast<size_t>(size(rng)));
        for (auto& x : a) x = value(rng);
        for (auto& x : b) x = value(rng);

        auto got = stats::welch_t_test(a, b);
        auto want = oracle::welch(a, b);
        CAPTURE(trial);
        CHECK(got.t == doctest::Approx(want.t).epsilon(1e-9));
        CHECK(got.df == doctest::Approx(want.df).epsilon(1e-9));
        CHECK(std::fabs(got.p - want.p) < 1e-9);

        auto got_f = stats::f_variance_test(a, b);
        auto want_f = oracle::f_ratio(a, b);
        CHECK(got_f.f == doctest::Approx(want_f.f).epsilon(1e-9));
        CHECK(std::fabs(got_f.p - want_f.p) < 1e-9);
    }
}

TEST_CASE("regularized incomplete beta agrees with quadrature") {
    for (auto [a, b] : {std::pair<double, double>{0.5, 2.0},
                        std::pair<double, double>{2.0, 0.5},
                        std::pair<double, double>{2.5, 3.5},
                        std::pair<double, double>{1.0, 1.0},
                        std::pair<double, double>{7.0, 2.0}}) {
        for (double x : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            CAPTURE(a);
            CAPTURE(b);
            CAPTURE(x);
            double got = stats::regularized_incomplete_beta(a, b, x);
            double want = oracle::regularized_incomplete_beta(a, b, x);
            CHECK(std::fabs(got - want) < 1e-9);
        }
    }
    // closed forms: I_x(2,2) = 3x^2 - 2x^3
    double x = 0.6 / 4.6;
    CHECK(stats::regularized_incomplete_beta(2.0, 2.0, x) ==
          doctest::Approx(3.0 * x * x - 2.0 * x * x * x).epsilon(1e-12));
}

TEST_CASE("symmetry: swapping groups negates t and inverts F") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(6), b(9);
        for (auto& x : a) x = value(rng);
        for (auto& x : b) x = value(rng);
        auto ab = stats::welch_t_test(a, b);
        auto ba = stats::welch_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.df == doctest::Approx(ba.df).epsilon(1e-12));
        auto fab = stats::f_variance_test(a, b);
        auto fba = stats::f_variance_test(b, a);
        CHECK(fab.f == doctest::Approx(1.0 / fba.f).epsilon(1e-12));
    }
}

TEST_CASE("scale invariance: multiplying both groups by c > 0 changes nothing") {
    std::vector<double> a{1.2, 3.4, 2.2, 5.6, 4.4};
    std::vector<double> b{2.0, 2.5, 3.5, 1.5, 4.0};
    auto base_t = stats::welch_t_test(a, b);
    auto base_f = stats::f_variance_test(a, b);
    for (double c : {0.25, 3.0, 117.0}) {
        std::vector<double> ca(a), cb(b);
        for (auto& x : ca) x *= c;
        for (auto& x : cb) x *= c;
        auto t = stats::welch_t_test(ca, cb);
        auto f = stats::f_variance_test(ca, cb);
        CHECK(t.t == doctest::Approx(base_t.t).epsilon(1e-9));
        CHECK(t.df == doctest::Approx(base_t.df).epsilon(1e-9));
        CHECK(t.p == doctest::Approx(base_t.p).epsilon(1e-9));
        CHECK(f.f == doctest::Approx(base_f.f).epsilon(1e-9));
        CHECK(f.p == doctest::Approx(base_f.p).epsilon(1e-9));
    }
}

TEST_CASE("preconditions are rejected") {
    std::vector<double> one{1.0};
    std::vector<double> ok{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(stats::welch_t_test(one, ok), std::invalid_argument);
    CHECK_THROWS_AS(stats::f_variance_test(ok, one), std::invalid_argument);
    CHECK_THROWS_AS(stats::sample_variance(one), std::invalid_argument);
}
