#include "fedgraph/rng.hpp"

#include <algorithm>
#include <cassert>

namespace fedgraph {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

inline uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(uint64_t seed, std::string_view tag) {
    uint64_t s = seed ^ 0x6a09e667f3bcc909ull;
    state_ = splitmix64(s) ^ fnv1a64(tag);
    // burn one step so streams with zero-ish mixes decorrelate
    splitmix64(state_);
}

uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::uniform_below(uint64_t n) {
    assert(n > 0);
    // rejection sampling for exact uniformity
    uint64_t threshold = (0 - n) % n;
    for (;;) {
        uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

int64_t RngStream::uniform_int(int64_t lo, int64_t hi) {
    assert(lo <= hi);
    return lo + static_cast<int64_t>(uniform_below(static_cast<uint64_t>(hi - lo) + 1));
}

double RngStream::uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u1, u2;
    do {
        u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_normal_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RngStream::log_normal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
}

uint64_t RngStream::poisson(double lambda) {
    assert(lambda >= 0.0);
    if (lambda == 0.0) return 0;
    const double limit = std::exp(-lambda);
    uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01();
    } while (p > limit);
    return k - 1;
}

uint64_t RngStream::binomial(uint64_t n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    uint64_t k = 0;
    for (uint64_t i = 0; i < n; ++i)
        if (uniform01() < p) ++k;
    return k;
}

std::vector<size_t> RngStream::sample_indices(size_t n, size_t k) {
    assert(k <= n);
    // Floyd's algorithm, then sort for a canonical order.
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t j = n - k; j < n; ++j) {
        size_t t = static_cast<size_t>(uniform_below(j + 1));
        if (std::find(out.begin(), out.end(), t) == out.end())
            out.push_back(t);
        else
            out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace fedgraph
