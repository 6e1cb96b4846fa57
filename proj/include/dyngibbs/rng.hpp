#pragma once

#include <array>
#include <cstdint>

namespace dyngibbs
{
//! Philox4x32-10 counter-based bijection.
using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

//---------------------------------------------------------------------------//
/*!
 * Seedable, splittable random stream.
 *
 * The key is the 64-bit seed; the counter's upper two words hold the stream
 * id and the lower two a block index. Each block yields two 64-bit draws.
 * Streams with distinct ids never share a counter value.
 */
class Rng
{
  public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    //! Derive an independent stream under the same seed
    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t next_u64();

    //! Uniform on [0, 1) with 53 random bits
    double uniform01()
    {
        return static_cast<double>(this->next_u64() >> 11) * 0x1.0p-53;
    }

    //! Uniform on (0, 1]
    double uniform_open0() { return 1.0 - this->uniform01(); }

    //! Unbiased uniform integer in [0, n), n > 0
    std::uint64_t uniform_index(std::uint64_t n);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int avail_ = 0;
};

}  // namespace dyngibbs
