#include <doctest.h>

#include <utility>
#include <vector>

#include "stochbayes/bitstream.hpp"
#include "stochbayes/rng.hpp"
#include "oracles.hpp"

using namespace stochbayes;

namespace {

Bitstream bernoulli_stream(double p, std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Bitstream bs(n);
    for (std::size_t i = 0; i < n; ++i) {
        bs.set_bit(i, rng.next_unit() < p);
    }
    return bs;
}

} // namespace

TEST_CASE("estimate is the ratio of ones") {
    CHECK(estimate(Bitstream::from_string("011")).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    Bitstream ones(64);
    for (std::size_t i = 0; i < 64; ++i) ones.set_bit(i, true);
    CHECK(estimate(ones).value() == 1.0);

    CHECK(estimate(Bitstream(256)).value() == 0.0);

    CHECK_THROWS_AS(Bitstream(0), std::invalid_argument);
}

TEST_CASE("and gate is bitwise conjunction") {
    CHECK(and_gate(Bitstream::from_string("1111"), Bitstream::from_string("0000")).to_string() ==
          "0000");
    CHECK(and_gate(Bitstream::from_string("1010"), Bitstream::from_string("1100")).to_string() ==
          "1000");
    CHECK_THROWS_AS(and_gate(Bitstream(4), Bitstream(5)), std::invalid_argument);
}

TEST_CASE("and gate of independent streams approximates the product") {
    const std::size_t n = 4096;
    const auto a = bernoulli_stream(0.5, n, 101);
    const auto b = bernoulli_stream(0.5, n, 202);
    const double product = estimate(and_gate(a, b)).value();
    // 0.25 +- 3 sigma of the binomial
    CHECK(std::abs(product - 0.25) <= 3.0 * oracle::binomial_sigma(0.25, double(n)));
}

TEST_CASE("mux gate selects a where sel is one") {
    const auto a = Bitstream::from_string("1010");
    const auto b = Bitstream::from_string("0110");
    CHECK(mux_gate(a, b, Bitstream::from_string("1111")).to_string() == a.to_string());
    CHECK(mux_gate(a, b, Bitstream::from_string("0000")).to_string() == b.to_string());
    CHECK_THROWS_AS(mux_gate(a, b, Bitstream(5)), std::invalid_argument);
}

TEST_CASE("mux gate computes scaled addition") {
    const std::size_t n = 4096;
    const auto a = bernoulli_stream(0.8, n, 1);
    const auto b = bernoulli_stream(0.2, n, 2);
    const auto sel = bernoulli_stream(0.5, n, 3);
    const double mixed = estimate(mux_gate(a, b, sel)).value();
    CHECK(std::abs(mixed - 0.5) <= 0.024);
}

TEST_CASE("mux gate popcount identity holds for arbitrary streams") {
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        const std::size_t n = 200 + 13 * seed; // deliberately off word boundaries
        const auto a = bernoulli_stream(0.3, n, seed * 3 + 1);
        const auto b = bernoulli_stream(0.7, n, seed * 3 + 2);
        const auto sel = bernoulli_stream(0.5, n, seed * 3 + 3);
        const auto out = mux_gate(a, b, sel);
        CHECK(out.popcount() == and_gate(a, sel).popcount() +
                                    and_gate(b, complement(sel)).popcount());
    }
}

TEST_CASE("and gate output estimate never exceeds either input") {
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        const auto a = bernoulli_stream(0.4, 321, seed + 50);
        const auto b = bernoulli_stream(0.6, 321, seed + 90);
        const double pa = estimate(a).value();
        const double pb = estimate(b).value();
        const double pboth = estimate(and_gate(a, b)).value();
        CHECK(pboth <= std::min(pa, pb));
    }
}

TEST_CASE("complement flips the estimate and keeps padding clean") {
    const auto a = bernoulli_stream(0.3, 100, 7);
    CHECK(estimate(complement(a)).value() == doctest::Approx(1.0 - estimate(a).value()));
    CHECK(complement(complement(a)).to_string() == a.to_string());
}

TEST_CASE("correlation of identical and complementary streams") {
    const auto a = Bitstream::from_string("10101010");
    CHECK(correlation(a, a) == doctest::Approx(1.0));
    CHECK(correlation(a, complement(a)) == doctest::Approx(-1.0));

    SUBCASE("constant stream returns 0 by convention") {
        CHECK(correlation(Bitstream(8), a) == 0.0);
        Bitstream ones(8);
        for (std::size_t i = 0; i < 8; ++i) ones.set_bit(i, true);
        CHECK(correlation(ones, a) == 0.0);
    }

    SUBCASE("length preconditions") {
        CHECK_THROWS_AS(correlation(Bitstream(4), Bitstream(5)), std::invalid_argument);
        CHECK_THROWS_AS(correlation(Bitstream::from_string("1"), Bitstream::from_string("1")),
                        std::invalid_argument);
    }
}

TEST_CASE("correlation of independent streams stays near zero") {
    // null-distribution check: |r| <= 3/sqrt(N) for at least 99% of pairs
    const std::size_t n = 256;
    const double bound = 3.0 / std::sqrt(double(n));
    int ok = 0;
    const int pairs = 200;
    for (int i = 0; i < pairs; ++i) {
        const auto a = bernoulli_stream(0.5, n, 1000 + 2 * i);
        const auto b = bernoulli_stream(0.5, n, 1001 + 2 * i);
        if (std::abs(correlation(a, b)) <= bound) {
            ++ok;
        }
    }
    CHECK(ok >= pairs * 99 / 100);
}

TEST_CASE("shuffling into the exact complement breaks the product") {
    // A deterministic 'decorrelating' shuffle can turn 10101010 into its
    // complement; both encode 0.5 but their AND decodes to 0, not 0.25.
    const auto sb1 = Bitstream::from_string("10101010");
    const auto sb2 = Bitstream::from_string("01010101");
    CHECK(estimate(sb1).value() == 0.5);
    CHECK(estimate(sb2).value() == 0.5);
    CHECK(estimate(and_gate(sb1, sb2)).value() == 0.0);
    CHECK(correlation(sb1, sb2) == doctest::Approx(-1.0));
}

TEST_CASE("mean absolute error") {
    using pairs_t = std::vector<std::pair<double, double>>;
    CHECK(mean_abs_error(pairs_t{{0.5, 0.5}}) == 0.0);
    CHECK(mean_abs_error(pairs_t{{0.2, 0.25}, {0.8, 0.75}}) == doctest::Approx(0.05));
    CHECK_THROWS_AS(mean_abs_error(pairs_t{}), std::invalid_argument);
}

TEST_CASE("probability type rejects out-of-range values") {
    CHECK_THROWS_AS(Probability(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(Probability(1.01), std::invalid_argument);
    CHECK(Probability(0.0).value() == 0.0);
    CHECK(Probability(1.0).value() == 1.0);
}

TEST_CASE("from_string round trips and rejects junk") {
    CHECK(Bitstream::from_string("0110").to_string() == "0110");
    CHECK_THROWS_AS(Bitstream::from_string("01x0"), std::invalid_argument);
}
