#include "arwlab/stats.hpp"
#include "arwlab/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arwlab {

double mean(const std::vector<double>& x)
{
    if (x.empty())
        return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x)
{
    if (x.size() < 2)
        return 0.0;
    double m = mean(x);
    double ss = 0.0;
    for (double v : x)
        ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q)
{
    if (x.empty())
        throw config_invalid("quantile of an empty sample");
    std::sort(x.begin(), x.end());
    double pos = q * static_cast<double>(x.size() - 1);
    auto i = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(i);
    if (i + 1 >= x.size())
        return x.back();
    return x[i] * (1.0 - frac) + x[i + 1] * frac;
}

double median(std::vector<double> x)
{
    return quantile(std::move(x), 0.5);
}

double jackknife_std_error(const std::vector<double>& x,
                           const std::function<double(const std::vector<double>&)>& statistic)
{
    const std::size_t n = x.size();
    if (n < 2)
        return 0.0;
    std::vector<double> loo(n);
    std::vector<double> rest(x.begin() + 1, x.end());
    for (std::size_t i = 0; i < n; ++i) {
        loo[i] = statistic(rest);
        if (i + 1 < n)
            rest[i] = x[i]; // rest becomes x without element i+1
    }
    double m = mean(loo);
    double ss = 0.0;
    for (double v : loo)
        ss += (v - m) * (v - m);
    return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
}

double jackknife_std_error(const std::vector<double>& x)
{
    if (x.size() < 2)
        return 0.0;
    return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

density_estimate estimate_mean(const std::vector<double>& x, std::string method, std::uint64_t seed)
{
    return {mean(x), jackknife_std_error(x), static_cast<long>(x.size()), std::move(method), seed};
}

test_result chi_square_test(const std::vector<long>& observed, const std::vector<double>& probabilities)
{
    if (observed.size() != probabilities.size() || observed.empty())
        throw config_invalid("chi-square needs matching observed and expected vectors");
    double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    // pool trailing cells with small expectation
    std::vector<double> obs, exp;
    double pool_obs = 0.0, pool_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = probabilities[i] * total;
        if (e >= 5.0 && pool_exp == 0.0) {
            obs.push_back(static_cast<double>(observed[i]));
            exp.push_back(e);
        } else {
            pool_obs += static_cast<double>(observed[i]);
            pool_exp += e;
        }
    }
    double psum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    pool_exp += std::max(0.0, (1.0 - psum) * total); // mass outside the listed cells
    if (pool_exp > 0.0) {
        obs.push_back(pool_obs);
        exp.push_back(pool_exp);
    }
    test_result r;
    for (std::size_t i = 0; i < obs.size(); ++i)
        r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    r.dof = static_cast<double>(obs.size()) - 1.0;
    if (r.dof < 1.0)
        return r;
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0)
        return 1.0;
    if (x < 0.2)
        return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

test_result ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw config_invalid("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v)
            ++i;
        while (j < b.size() && b[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    test_result r;
    r.statistic = d;
    double ne = std::sqrt(na * nb / (na + nb));
    r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return r;
}

linear_fit_result linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw config_invalid("linear fit needs two or more paired points");
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    linear_fit_result r;
    r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    r.intercept = my - r.slope * mx;
    r.r_squared = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 1.0;
    return r;
}

double proportion_std_error(double p, long n)
{
    if (n <= 0)
        return 0.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

} // namespace arwlab
