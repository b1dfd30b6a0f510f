#pragma once

#include <array>
#include <cstdint>

namespace itolab {

// Identifies one reproducible random stream. Monte Carlo path i of a run
// seeded with `root_seed` uses stream_id = i.
//
// Mapping to generator state: Philox4x32-10 with
//   key     = (low32(root_seed), high32(root_seed))
//   counter = (low32(block), high32(block), low32(stream_id), high32(stream_id))
// where block = draw_index / 2. Philox is a bijection of the counter for a
// fixed key, so distinct (root_seed, stream_id, draw_index) triples never
// share a counter/key pair.
struct SeedSpec {
    std::uint64_t root_seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Root seed for an independent sub-experiment (a convergence level, a
// refinement pass): mix64(root ^ mix64(tag + 0x9e3779b97f4a7c15)).
std::uint64_t derive_root(std::uint64_t root, std::uint64_t tag) noexcept;

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Sequential reader over the counter-based stream of a SeedSpec. Each draw is
// a 64-bit word; seek() gives random access by draw index.
class RandomStream {
public:
    explicit RandomStream(SeedSpec seed) noexcept;

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0,1) with 53-bit resolution.
    double uniform() noexcept;
    // Standard normal via inverse CDF of uniform(); exactly one draw.
    double normal() noexcept;

    void seek(std::uint64_t draw_index) noexcept;
    std::uint64_t position() const noexcept { return position_; }
    const SeedSpec& seed() const noexcept { return seed_; }

private:
    void refill() noexcept;

    SeedSpec seed_;
    PhiloxKey key_;
    PhiloxCounter block_{};
    std::uint64_t position_ = 0;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
};

} // namespace itolab
