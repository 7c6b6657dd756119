#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fpt::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output depends only on (key, counter), so streams can be addressed
/// directly by trajectory index.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block ctr) const {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key_;
};

/// Standard normal deviates for one stream (trajectory), Box-Muller on
/// 53-bit uniforms. Each Philox block yields two normals.
class NormalStream {
public:
    NormalStream(const Philox4x32& gen, std::uint64_t stream) : gen_(gen), stream_(stream) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto b = gen_({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
        ++block_;
        const double u1 = to_open_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
        const double u2 = to_open_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Maps the top 53 bits to (0, 1].
    static double to_open_unit(std::uint64_t bits) { return ((bits >> 11) + 1) * 0x1.0p-53; }

private:
    Philox4x32 gen_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fpt::rng
