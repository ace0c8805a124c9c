// rng.hpp - counter-based splittable random streams.
//
// Every random quantity in the library is addressed by a (seed, tag, tag, ...)
// path instead of a shared mutable generator, so results are identical no
// matter how trials are partitioned across threads.

#pragma once

#include <cmath>
#include <cstdint>

namespace thir {

// SplitMix64-style keyed counter generator.  Output i of a stream with key k
// is mix(k + (i+1)*golden); child streams are re-keyed through two extra
// mixing rounds so structured tags (0, 1, 2, ...) do not alias.
class CounterRng {
public:
    CounterRng() = default;
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Child stream addressed by `tag`.  Pure: does not advance this stream.
    CounterRng derive(std::uint64_t tag) const {
        std::uint64_t k = mix(key_ + kGolden * (tag + 1));
        return CounterRng(mix(k ^ 0x6a09e667f3bcc909ull));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [0, n).  Lemire multiply-shift; bias is O(n / 2^64).
    std::uint32_t next_below(std::uint32_t n) {
        return std::uint32_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // +1 or -1 with equal probability.
    int next_sign() { return (next_u64() >> 63) ? -1 : 1; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0, 1], keeps log() finite
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags used by the simulation layers.  Kept in one place so the
// addressing scheme is stable and collision-free by inspection.
namespace stream {
inline constexpr std::uint64_t kHopping = 0x10;
inline constexpr std::uint64_t kSymbols = 0x11;
inline constexpr std::uint64_t kNoise = 0x12;
inline constexpr std::uint64_t kRetry = 0x1f;
}  // namespace stream

}  // namespace thir
