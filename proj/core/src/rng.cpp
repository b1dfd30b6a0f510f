#include <itolab/rng.hpp>

#include <itolab/normal.hpp>

namespace itolab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) noexcept {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_root(std::uint64_t root, std::uint64_t tag) noexcept {
    return mix64(root ^ mix64(tag + 0x9E3779B97F4A7C15ull));
}

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        counter = philox_round(counter, key);
    }
    return counter;
}

RandomStream::RandomStream(SeedSpec seed) noexcept
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed.root_seed), static_cast<std::uint32_t>(seed.root_seed >> 32)} {}

void RandomStream::refill() noexcept {
    const std::uint64_t block = position_ >> 1;
    const PhiloxCounter counter{
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(seed_.stream_id), static_cast<std::uint32_t>(seed_.stream_id >> 32)};
    block_ = philox4x32_10(counter, key_);
    cached_block_ = block;
}

std::uint64_t RandomStream::next_u64() noexcept {
    if ((position_ >> 1) != cached_block_) {
        refill();
    }
    const std::size_t half = static_cast<std::size_t>(position_ & 1u) * 2;
    ++position_;
    return (static_cast<std::uint64_t>(block_[half]) << 32) | block_[half + 1];
}

double RandomStream::uniform() noexcept {
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double RandomStream::normal() noexcept {
    return inverse_normal_cdf(uniform());
}

void RandomStream::seek(std::uint64_t draw_index) noexcept {
    position_ = draw_index;
}

} // namespace itolab
