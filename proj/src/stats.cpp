#include "kgov/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kgov::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs at least two observations");
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double sample_std(const std::vector<double>& xs) {
    return std::sqrt(sample_variance(xs));
}

namespace {

// Lentz's continued fraction for the incomplete beta function.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);

    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

double f_lower_tail_p(double f, double df1, double df2) {
    if (f <= 0.0) return 0.0;
    double x = df1 * f / (df1 * f + df2);
    return regularized_incomplete_beta(df1 / 2.0, df2 / 2.0, x);
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test needs at least two observations per group");

    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double va = sample_variance(a);
    double vb = sample_variance(b);

    WelchResult r;
    if (va == 0.0 && vb == 0.0) {
        r.degenerate = true;
        r.t = std::numeric_limits<double>::quiet_NaN();
        r.df = std::numeric_limits<double>::quiet_NaN();
        r.p = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    double se2 = va / na + vb / nb;
    r.t = (mean(a) - mean(b)) / std::sqrt(se2);
    r.df = se2 * se2 /
           (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

FTestResult f_variance_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("f_variance_test needs at least two observations per group");

    double va = sample_variance(a);
    double vb = sample_variance(b);

    FTestResult r;
    r.df1 = static_cast<int>(a.size()) - 1;
    r.df2 = static_cast<int>(b.size()) - 1;
    if (vb == 0.0) {
        r.degenerate = true;
        r.f = std::numeric_limits<double>::quiet_NaN();
        r.p = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.f = va / vb;
    r.p = f_lower_tail_p(r.f, r.df1, r.df2);
    return r;
}

} // namespace kgov::stats
