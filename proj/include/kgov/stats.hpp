#pragma once
// Small-sample trial statistics: Welch's t, the variance-ratio F test, and
// the p-value machinery behind them (regularized incomplete beta via the
// standard continued-fraction evaluation).

#include <vector>

namespace kgov::stats {

double mean(const std::vector<double>& xs);

// n-1 denominator
double sample_variance(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;      // two-sided
    bool degenerate = false; // both variances zero: t undefined
};

// t = (mean_a - mean_b) / sqrt(s2_a/n_a + s2_b/n_b), df by Welch-Satterthwaite.
// Requires at least two observations per group.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct FTestResult {
    double f = 1.0;
    int df1 = 0;
    int df2 = 0;
    double p = 1.0;      // one-sided, lower tail: P(F <= observed)
    bool degenerate = false; // denominator variance zero
};

// F = s2_a / s2_b with df (n_a-1, n_b-1). The one-sided p answers the
// variance-reduction question: how extreme is it for group a to vary this
// much less than group b.
FTestResult f_variance_test(const std::vector<double>& a, const std::vector<double>& b);

// I_x(a, b), continued-fraction evaluation, |error| < 1e-12 for sane inputs.
double regularized_incomplete_beta(double a, double b, double x);

// two-sided tail of Student's t with df degrees of freedom
double student_t_two_sided_p(double t, double df);

// P(F <= f) for the F distribution with (df1, df2) degrees of freedom
double f_lower_tail_p(double f, double df1, double df2);

} // namespace kgov::stats
