// rng.hpp — counter-based random streams (Philox4x32-10).
//
// Every consumer derives an independent stream from (master seed, label,
// index).  Streams are stateless functions of their coordinates, so results
// do not depend on scheduling or thread count.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace starbm {

struct Seed {
    std::uint64_t master = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0x2545F4914F6CDD1Dull;
    for (char c : label) h = splitmix64(h ^ static_cast<unsigned char>(c));
    return h;
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

} // namespace detail

// One independent stream of doubles.  Cheap to construct; holds only the
// counter coordinates plus a 4-word output buffer.
class RngStream {
  public:
    RngStream(Seed seed, std::string_view label, std::uint64_t index = 0)
        : key_{static_cast<std::uint32_t>(seed.master),
               static_cast<std::uint32_t>(seed.master >> 32)},
          stream_(detail::splitmix64(detail::hash_label(label) ^
                                     detail::splitmix64(index ^ 0x517CC1B727220A95ull))) {}

    std::uint64_t next_u64() {
        if (pos_ == 0) refill();
        const std::uint32_t lo = buf_[pos_ - 1], hi = buf_[pos_ - 2];
        pos_ -= 2;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // rate <= 0 models an event that never happens.
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(uniform()) / rate;
    }

  private:
    void refill() {
        buf_ = detail::philox4x32({static_cast<std::uint32_t>(counter_),
                                   static_cast<std::uint32_t>(counter_ >> 32),
                                   static_cast<std::uint32_t>(stream_),
                                   static_cast<std::uint32_t>(stream_ >> 32)},
                                  key_);
        ++counter_;
        pos_ = 4;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace starbm
