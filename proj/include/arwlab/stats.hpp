#ifndef ARWLAB_STATS_HPP
#define ARWLAB_STATS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace arwlab {

// Monte Carlo point estimate with its standard error and seed lineage.
struct density_estimate {
    double point = 0.0;
    double std_error = 0.0;
    long replicas = 0;
    std::string method;
    std::uint64_t seed = 0;
};

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);

// Leave-one-out jackknife standard error of a statistic.
double jackknife_std_error(const std::vector<double>& x,
                           const std::function<double(const std::vector<double>&)>& statistic);
// Jackknife standard error of the mean (equals the sample sd over sqrt(n)).
double jackknife_std_error(const std::vector<double>& x);

density_estimate estimate_mean(const std::vector<double>& x, std::string method, std::uint64_t seed);

struct test_result {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

// Pearson chi-square goodness of fit; cells with expected count < 5 are pooled into a tail bin.
test_result chi_square_test(const std::vector<long>& observed, const std::vector<double>& probabilities);

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov distribution.
test_result ks_two_sample(std::vector<double> a, std::vector<double> b);
// Survival function of the Kolmogorov distribution, P[K > x].
double kolmogorov_survival(double x);

struct linear_fit_result {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
linear_fit_result linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Standard error of a Bernoulli frequency.
double proportion_std_error(double p, long n);

} // namespace arwlab

#endif
