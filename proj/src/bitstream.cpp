#include "stochbayes/bitstream.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace stochbayes {

namespace {

std::size_t word_count(std::size_t length) {
    return (length + 63) / 64;
}

void require_same_length(const Bitstream& a, const Bitstream& b, const char* op) {
    if (a.length() != b.length()) {
        throw std::invalid_argument(std::string(op) + ": stream length mismatch (" +
                                    std::to_string(a.length()) + " vs " +
                                    std::to_string(b.length()) + ")");
    }
}

} // namespace

Probability::Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument("probability outside [0,1]: " + std::to_string(value));
    }
}

Bitstream::Bitstream(std::size_t length)
    : length_(length), words_(word_count(length), 0) {
    if (length == 0) {
        throw std::invalid_argument("bitstream length must be >= 1");
    }
}

Bitstream Bitstream::from_string(std::string_view bits) {
    Bitstream bs(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            bs.set_bit(i, true);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("bitstream string may contain only '0' and '1'");
        }
    }
    return bs;
}

std::size_t Bitstream::popcount() const {
    std::size_t count = 0;
    for (std::uint64_t w : words_) {
        count += static_cast<std::size_t>(std::popcount(w));
    }
    return count;
}

void Bitstream::mask_tail() {
    const std::size_t tail = length_ & 63;
    if (tail != 0) {
        words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
}

std::string Bitstream::to_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
        if (bit(i)) {
            s[i] = '1';
        }
    }
    return s;
}

Probability estimate(const Bitstream& bs) {
    return Probability(static_cast<double>(bs.popcount()) /
                       static_cast<double>(bs.length()));
}

Bitstream and_gate(const Bitstream& a, const Bitstream& b) {
    require_same_length(a, b, "and_gate");
    Bitstream out(a.length());
    auto ow = out.words();
    auto aw = a.words();
    auto bw = b.words();
    for (std::size_t i = 0; i < ow.size(); ++i) {
        ow[i] = aw[i] & bw[i];
    }
    return out;
}

Bitstream mux_gate(const Bitstream& a, const Bitstream& b, const Bitstream& sel) {
    require_same_length(a, b, "mux_gate");
    require_same_length(a, sel, "mux_gate");
    Bitstream out(a.length());
    auto ow = out.words();
    auto aw = a.words();
    auto bw = b.words();
    auto sw = sel.words();
    for (std::size_t i = 0; i < ow.size(); ++i) {
        ow[i] = (aw[i] & sw[i]) | (bw[i] & ~sw[i]);
    }
    out.mask_tail();
    return out;
}

Bitstream complement(const Bitstream& a) {
    Bitstream out(a.length());
    auto ow = out.words();
    auto aw = a.words();
    for (std::size_t i = 0; i < ow.size(); ++i) {
        ow[i] = ~aw[i];
    }
    out.mask_tail();
    return out;
}

double correlation(const Bitstream& a, const Bitstream& b) {
    require_same_length(a, b, "correlation");
    if (a.length() < 2) {
        throw std::invalid_argument("correlation requires length >= 2");
    }
    const double n = static_cast<double>(a.length());
    const double sa = static_cast<double>(a.popcount());
    const double sb = static_cast<double>(b.popcount());
    const double sab = static_cast<double>(and_gate(a, b).popcount());
    const double var_a = sa * (n - sa);
    const double var_b = sb * (n - sb);
    if (var_a == 0.0 || var_b == 0.0) {
        return 0.0; // constant stream: Pearson undefined, 0 by convention
    }
    return (n * sab - sa * sb) / std::sqrt(var_a * var_b);
}

double mean_abs_error(std::span<const std::pair<double, double>> pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("mean_abs_error: empty list");
    }
    double sum = 0.0;
    for (const auto& [target, measured] : pairs) {
        sum += std::abs(target - measured);
    }
    return sum / static_cast<double>(pairs.size());
}

} // namespace stochbayes
