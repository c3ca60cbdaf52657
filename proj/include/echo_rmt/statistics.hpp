#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace echo_rmt {

/// Running first and second moments of one observable on a time grid.
struct MomentSums {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    /// Samples accumulated at every time point.
    std::size_t count = 0;

    explicit MomentSums(std::size_t n = 0, std::size_t samples = 0) : sum(n, 0.0), sum_sq(n, 0.0), count(samples) {}

    void add(std::size_t k, double x)
    {
        sum[k] += x;
        sum_sq[k] += x * x;
    }
};

/*
 * Combines per-realization MomentSums. The mean is over all samples; the
 * standard error is taken over realization means when there are at least two
 * realizations, and over individual samples otherwise.
 */
struct ClusteredMoments {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::vector<double> cluster_sum;
    std::vector<double> cluster_sum_sq;
    std::size_t samples = 0;
    std::size_t clusters = 0;

    explicit ClusteredMoments(std::size_t n = 0)
        : sum(n, 0.0), sum_sq(n, 0.0), cluster_sum(n, 0.0), cluster_sum_sq(n, 0.0)
    {
    }

    void add_cluster(const MomentSums& part)
    {
        if (part.count == 0) {
            return;
        }
        const double n = static_cast<double>(part.count);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += part.sum[k];
            sum_sq[k] += part.sum_sq[k];
            const double m = part.sum[k] / n;
            cluster_sum[k] += m;
            cluster_sum_sq[k] += m * m;
        }
        samples += part.count;
        ++clusters;
    }

    void finish(std::vector<double>& mean, std::vector<double>& stderr_out) const
    {
        mean.assign(sum.size(), 0.0);
        stderr_out.assign(sum.size(), 0.0);
        if (samples == 0) {
            return;
        }
        const double n = static_cast<double>(samples);
        const double c = static_cast<double>(clusters);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            mean[k] = sum[k] / n;
            if (clusters > 1) {
                const double cm = cluster_sum[k] / c;
                const double var = std::max(0.0, (cluster_sum_sq[k] - c * cm * cm) / (c - 1.0));
                stderr_out[k] = std::sqrt(var / c);
            } else if (samples > 1) {
                const double var = std::max(0.0, (sum_sq[k] - n * mean[k] * mean[k]) / (n - 1.0));
                stderr_out[k] = std::sqrt(var / n);
            }
        }
    }
};

} // namespace echo_rmt
