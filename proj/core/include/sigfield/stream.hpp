#pragma once

#include <array>
#include <cstdint>

namespace sigfield {

// Counter-based generator (Philox4x32-10, Salmon et al. 2011).  A stream is
// addressed by (seed, stream_id); the output sequence is a pure function of
// that address and the draw counter, so parallel trials with distinct
// stream ids reproduce bit-identically regardless of thread count.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

class SeededStream {
public:
    SeededStream() = default;
    SeededStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // A sibling stream with the same seed; ids are namespaced by mixing so
    // that derived(a).derived(b) never collides with derived(b).derived(a).
    SeededStream derived(std::uint64_t sub_id) const;

    std::uint64_t next_u64();
    // Uniform on [0,1), 53 random bits.
    double next_double();
    // Standard normal via inverse CDF (one uniform consumed per draw).
    double next_normal();

    void skip(std::uint64_t n_u64) { position_ += n_u64; }
    std::uint64_t position() const { return position_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t position_ = 0;  // index of the next 64-bit draw
    // One Philox block yields two 64-bit draws; cache the second.
    std::uint64_t cached_ = 0;
    std::uint64_t cached_pos_ = ~std::uint64_t{0};
};

// Inverse standard normal CDF, used for deterministic gaussian sampling and
// truncated-gaussian quantile transforms.
double normal_quantile(double p);
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace sigfield
