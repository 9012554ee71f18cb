#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace fedgraph {

/// Deterministic counter-based random stream. Every consumer derives its own
/// stream from (master seed, tag), so generation order never depends on how
/// other streams were consumed. All sampling is implemented here rather than
/// with std::*_distribution, whose output is implementation-defined; byte
/// reproducibility of generated worlds depends on it.
class RngStream {
public:
    RngStream(uint64_t seed, std::string_view tag);

    uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of mantissa.
    double uniform01();

    /// Uniform in [0, n). n must be > 0.
    uint64_t uniform_below(uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi);

    double uniform_real(double lo, double hi);

    /// Standard normal via Box-Muller (second deviate cached).
    double normal();

    double log_normal(double mu, double sigma);

    /// Knuth's product method; fine for the lambdas used here (< ~700).
    uint64_t poisson(double lambda);

    /// Binomial(n, p) by direct Bernoulli summation (n is small here).
    uint64_t binomial(uint64_t n, double p);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices out of [0, n), in sorted order.
    std::vector<size_t> sample_indices(size_t n, size_t k);

private:
    uint64_t state_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// FNV-1a, used for stream tags and schema hashes.
uint64_t fnv1a64(std::string_view s);

} // namespace fedgraph
