#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stochbayes {

/// A probability value, guaranteed to lie in [0, 1].
class Probability {
public:
    explicit Probability(double value);
    double value() const { return value_; }

private:
    double value_;
};

/// Fixed-length stochastic bitstream. The fraction of set bits encodes a
/// number in [0, 1]. Bits are stored packed into 64-bit words so that the
/// gate operations and popcount run word-parallel; any padding bits beyond
/// `length()` are kept zero.
///
/// Bit index i corresponds to generation cycle i. Streams are immutable in
/// normal use: gates produce fresh streams, so values can be shared across
/// threads freely.
class Bitstream {
public:
    /// All-zero stream of `length` bits. Throws std::invalid_argument for
    /// length 0.
    explicit Bitstream(std::size_t length);

    /// Builds a stream from a character string of '0'/'1', first character
    /// = cycle 0.
    static Bitstream from_string(std::string_view bits);

    std::size_t length() const { return length_; }

    bool bit(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set_bit(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    std::size_t popcount() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    /// Zeroes any bits at positions >= length(). Only needed after writing
    /// whole words directly.
    void mask_tail();

    std::string to_string() const;

private:
    std::size_t length_;
    std::vector<std::uint64_t> words_;
};

/// Fraction of set bits, popcount/length.
Probability estimate(const Bitstream& bs);

/// Bitwise AND; for independent inputs the output estimate approximates
/// p1*p2. Lengths must match.
Bitstream and_gate(const Bitstream& a, const Bitstream& b);

/// Multiplexer: output bit i is a_i where sel_i = 1, else b_i. For
/// independent inputs the output estimate approximates p1*p3 + p2*(1-p3).
/// Lengths must match.
Bitstream mux_gate(const Bitstream& a, const Bitstream& b, const Bitstream& sel);

/// Bitwise complement; estimate(complement(a)) = 1 - estimate(a).
Bitstream complement(const Bitstream& a);

/// Pearson correlation of the two 0/1 sequences, in [-1, 1]. Returns 0 when
/// either stream is constant (all zeros or all ones), where the coefficient
/// is undefined. Lengths must match and be >= 2.
double correlation(const Bitstream& a, const Bitstream& b);

/// Mean of |target - measured| over a non-empty list of pairs.
double mean_abs_error(std::span<const std::pair<double, double>> pairs);

} // namespace stochbayes
