#include "sigfield/stream.hpp"

#include <boost/math/distributions/normal.hpp>

namespace sigfield {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kPhiloxM0, c[0], lo0, hi0);
    mul_hi_lo(kPhiloxM1, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// SplitMix64 finalizer; used to decorrelate derived stream ids.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

SeededStream SeededStream::derived(std::uint64_t sub_id) const {
    return SeededStream(seed_, mix64(stream_id_ ^ mix64(sub_id)));
}

std::uint64_t SeededStream::next_u64() {
    const std::uint64_t pos = position_++;
    if (pos == cached_pos_) return cached_;

    const std::uint64_t block_index = pos >> 1;
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_index),
        static_cast<std::uint32_t>(block_index >> 32),
        static_cast<std::uint32_t>(stream_id_),
        static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed_),
        static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = Philox4x32::block(counter, key);

    const std::uint64_t first = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t second = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    if ((pos & 1) == 0) {
        cached_ = second;
        cached_pos_ = pos + 1;
        return first;
    }
    return second;
}

double SeededStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededStream::next_normal() {
    // next_double() is in [0,1); shift to (0,1) to keep the quantile finite.
    const double u = 0.5 * 0x1.0p-53 + next_double() * (1.0 - 0x1.0p-53);
    return normal_quantile(u);
}

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }
double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }
double normal_pdf(double x) { return boost::math::pdf(kStdNormal, x); }

}  // namespace sigfield
