#include "edamcc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace edamcc::stats {

SampleSummary summarize(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("summarize: empty sample");
    SampleSummary s;
    s.count = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    // Guard against the mean drifting outside [min,max] by rounding.
    s.mean = std::clamp(s.mean, s.min, s.max);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.sample_std = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

namespace {

struct Ranking {
    double rank_sum_a = 0.0;
    double tie_term = 0.0; // sum over tie groups of t^3 - t
    bool has_ties = false;
};

Ranking rank(std::span<const double> a, std::span<const double> b) {
    struct Item {
        double value;
        bool from_a;
    };
    std::vector<Item> items;
    items.reserve(a.size() + b.size());
    for (double v : a)
        items.push_back({v, true});
    for (double v : b)
        items.push_back({v, false});
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

    Ranking r;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j + 1 < items.size() && items[j + 1].value == items[i].value)
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        const auto t = static_cast<double>(j - i + 1);
        if (t > 1) {
            r.has_ties = true;
            r.tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k <= j; ++k) {
            if (items[k].from_a)
                r.rank_sum_a += midrank;
        }
        i = j + 1;
    }
    return r;
}

// Null distribution of U_a (no ties) by the subset-sum recurrence over ranks.
std::vector<double> exact_u_distribution(std::size_t na, std::size_t nb) {
    const std::size_t total = na + nb;
    const std::size_t max_sum = total * (total + 1) / 2;
    // ways[k][s]: subsets of size k of the ranks seen so far with rank sum s.
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t r = 1; r <= total; ++r) {
        for (std::size_t k = std::min(na, r); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= r; --s)
                ways[k][s] += ways[k - 1][s - r];
        }
    }
    const std::size_t offset = na * (na + 1) / 2;
    std::vector<double> counts(na * nb + 1, 0.0);
    for (std::size_t u = 0; u <= na * nb; ++u)
        counts[u] = ways[na][u + offset];
    return counts;
}

double exact_p(double u, std::size_t na, std::size_t nb) {
    const auto counts = exact_u_distribution(na, nb);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto ui = static_cast<std::size_t>(std::llround(u));
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k <= ui)
            lower += counts[k];
        if (k >= ui)
            upper += counts[k];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double normal_p(double u, std::size_t na, std::size_t nb, double tie_term) {
    const double n1 = static_cast<double>(na);
    const double n2 = static_cast<double>(nb);
    const double n = n1 + n2;
    const double mean = 0.5 * n1 * n2;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0))
        return 1.0;
    const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(var);
    return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

} // namespace

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, UTestPolicy policy) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const Ranking r = rank(a, b);

    UTestResult out;
    out.u_statistic = r.rank_sum_a - 0.5 * static_cast<double>(na * (na + 1));
    out.u_other = static_cast<double>(na * nb) - out.u_statistic;

    bool exact = false;
    switch (policy) {
    case UTestPolicy::automatic:
        exact = na + nb <= 16 && !r.has_ties;
        break;
    case UTestPolicy::force_exact:
        if (r.has_ties)
            throw std::invalid_argument("mann_whitney_u: exact distribution requires distinct values");
        exact = true;
        break;
    case UTestPolicy::force_normal:
        exact = false;
        break;
    }

    if (exact) {
        out.method = UTestMethod::exact;
        out.p_two_tailed = exact_p(out.u_statistic, na, nb);
    } else {
        out.method = UTestMethod::normal_approximation;
        out.p_two_tailed = normal_p(out.u_statistic, na, nb, r.tie_term);
    }
    return out;
}

std::string significance_marker(double p) {
    if (p < 0.001)
        return "§";
    if (p < 0.01)
        return "†";
    if (p < 0.05)
        return "*";
    return "";
}

std::string significance_marker_ascii(double p) {
    if (p < 0.001)
        return "***";
    if (p < 0.01)
        return "**";
    if (p < 0.05)
        return "*";
    return "";
}

} // namespace edamcc::stats
