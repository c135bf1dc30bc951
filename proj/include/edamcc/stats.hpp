#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace edamcc::stats {

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double sample_std = 0.0; // divisor count - 1; 0 for a single value
    double min = 0.0;
    double max = 0.0;
};

SampleSummary summarize(std::span<const double> values);

enum class UTestMethod { exact, normal_approximation };

/// How mann_whitney_u picks its p-value route. `automatic` uses the exact null
/// distribution when n_a + n_b <= 16 and there are no ties.
enum class UTestPolicy { automatic, force_exact, force_normal };

struct UTestResult {
    double u_statistic = 0.0; // U for the first sample
    double u_other = 0.0;     // U for the second sample; u_statistic + u_other = n_a * n_b
    double p_two_tailed = 1.0;
    UTestMethod method = UTestMethod::exact;
};

/// Two-sided Mann-Whitney U test with midranks for ties. The normal route
/// applies the tie-corrected variance and a 0.5 continuity correction.
/// force_exact with tied values throws std::invalid_argument.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                           UTestPolicy policy = UTestPolicy::automatic);

/// "§" for p < 0.001, "†" for p < 0.01, "*" for p < 0.05, empty otherwise.
std::string significance_marker(double p);

/// ASCII form: "***", "**", "*" or empty.
std::string significance_marker_ascii(double p);

} // namespace edamcc::stats
