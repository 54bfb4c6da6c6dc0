#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "coordsim/channelsim.hpp"
#include "coordsim/metrics.hpp"
#include "coordsim/probmodel.hpp"

using namespace coordsim;

TEST_CASE("substreams are pure functions of their address") {
    RandomnessStreams rng(42);
    Substream a = rng.stream(StreamKind::Source, 1, 2);
    Substream b = rng.stream(StreamKind::Source, 1, 2);
    for (int c = 0; c < 16; ++c) CHECK(a.word_at(c) == b.word_at(c));

    // Any change of kind, label, or block moves to an unrelated sequence.
    CHECK(rng.stream(StreamKind::Source, 1, 2).word_at(0) !=
          rng.stream(StreamKind::Channel, 1, 2).word_at(0));
    CHECK(rng.stream(StreamKind::Source, 1, 2).word_at(0) !=
          rng.stream(StreamKind::Source, 2, 2).word_at(0));
    CHECK(rng.stream(StreamKind::Source, 1, 2).word_at(0) !=
          rng.stream(StreamKind::Source, 1, 3).word_at(0));
    CHECK(RandomnessStreams(43).stream(StreamKind::Source, 1, 2).word_at(0) != a.word_at(0));
}

TEST_CASE("consuming one stream never disturbs another") {
    RandomnessStreams rng(7);
    Substream a = rng.stream(StreamKind::LocalM, 1, 0);
    Substream b = rng.stream(StreamKind::LocalM, 2, 0);
    std::vector<std::uint64_t> before;
    for (int c = 0; c < 8; ++c) before.push_back(b.word_at(c));
    for (int c = 0; c < 1000; ++c) (void)a.draw();
    for (int c = 0; c < 8; ++c) CHECK(b.word_at(c) == before[c]);
}

TEST_CASE("uniform doubles live in the unit interval") {
    RandomnessStreams rng(3);
    Substream s = rng.stream(StreamKind::Decoder, 0, 0);
    double mean = 0;
    const int trials = 20000;
    for (int c = 0; c < trials; ++c) {
        const double u = s.u01_at(c);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        mean += u;
    }
    mean /= trials;
    CHECK(std::abs(mean - 0.5) < 3.0 / std::sqrt(12.0 * trials));
}

TEST_CASE("source sampling") {
    RandomnessStreams rng(5);

    SymbolBlock point = sample_source(FiniteDist({0.0, 0.0, 1.0}), 100,
                                      rng.stream(StreamKind::Source, 0, 0));
    for (int t = 0; t < 100; ++t) CHECK(point[t] == 2);
    CHECK(point.alphabet_size == 3);

    const int n = 100000;
    SymbolBlock fair =
        sample_source(FiniteDist::bernoulli(0.5), n, rng.stream(StreamKind::Source, 0, 1));
    const double ones = std::accumulate(fair.symbols.begin(), fair.symbols.end(), 0.0) / n;
    CHECK(std::abs(ones - 0.5) <= 3.0 / (2 * std::sqrt(double(n))));

    CHECK(sample_source(FiniteDist::bernoulli(0.5), 0, rng.stream(StreamKind::Source, 0, 2)).n() ==
          0);
}

TEST_CASE("transmission basics") {
    RandomnessStreams rng(6);
    const int n = 100000;
    BitBlock x(n);
    Substream sx = rng.stream(StreamKind::Source, 0, 0);
    for (int t = 0; t < n; ++t) x[t] = sx.draw_bit();

    SymbolBlock clean = transmit(x, CondDist::identity(2), rng.stream(StreamKind::Channel, 0, 0));
    for (int t = 0; t < n; ++t) REQUIRE(clean[t] == x[t]);

    SymbolBlock noisy = transmit(x, CondDist::bsc(0.1), rng.stream(StreamKind::Channel, 0, 1));
    int flips = 0;
    for (int t = 0; t < n; ++t) flips += noisy[t] != x[t];
    CHECK(std::abs(flips / double(n) - 0.1) <= 3 * std::sqrt(0.09 / n));
}

TEST_CASE("pure-noise channel output is empirically independent") {
    RandomnessStreams rng(8);
    const int n = 100000;
    BitBlock x(n);
    Substream sx = rng.stream(StreamKind::Source, 0, 0);
    for (int t = 0; t < n; ++t) x[t] = sx.draw_bit();
    SymbolBlock y = transmit(x, CondDist::bsc(0.5), rng.stream(StreamKind::Channel, 0, 0));

    const SymbolBlock xs = SymbolBlock::from_bits(x);
    const std::vector<std::string> roles = {"X", "Y"};
    const std::vector<int> dims = {2, 2};
    const EmpiricalType type = type_of(roles, dims, {{&xs}, {&y}});
    const std::vector<std::string> vx = {"X"}, vy = {"Y"};
    CHECK(mutual_information(type.distribution(), vx, vy) < 1e-4);
}

TEST_CASE("transmission is a per-position pure function") {
    // Each output symbol depends only on (its input symbol, its position), so
    // permuting the input is the same as reading the rows in permuted order.
    RandomnessStreams rng(9);
    const CondDist channel({2}, 3, {0.5, 0.3, 0.2, 0.1, 0.2, 0.7});
    const int n = 64;
    BitBlock x(n);
    Substream sx = rng.stream(StreamKind::Source, 0, 0);
    for (int t = 0; t < n; ++t) x[t] = sx.draw_bit();

    Substream noise = rng.stream(StreamKind::Channel, 4, 7);
    SymbolBlock y = transmit(x, channel, noise);
    for (int t = 0; t < n; ++t) {
        const FiniteDist row({channel.prob(std::vector<int>{x[t]}, 0),
                              channel.prob(std::vector<int>{x[t]}, 1),
                              channel.prob(std::vector<int>{x[t]}, 2)});
        CHECK(y[t] == noise.symbol_at(row, t));
    }

    // Reversed input under the same stream: position t sees input x[n-1-t].
    BitBlock rx(n);
    for (int t = 0; t < n; ++t) rx[t] = x[n - 1 - t];
    SymbolBlock ry = transmit(rx, channel, noise);
    for (int t = 0; t < n; ++t) {
        const FiniteDist row({channel.prob(std::vector<int>{rx[t]}, 0),
                              channel.prob(std::vector<int>{rx[t]}, 1),
                              channel.prob(std::vector<int>{rx[t]}, 2)});
        CHECK(ry[t] == noise.symbol_at(row, t));
    }
}

TEST_CASE("transmit validates its channel") {
    RandomnessStreams rng(10);
    BitBlock x(4);
    CHECK_THROWS_AS(transmit(x, CondDist({2, 2}, 2, {1, 0, 1, 0, 0, 1, 0, 1}),
                             rng.stream(StreamKind::Channel, 0, 0)),
                    std::invalid_argument);
    x[0] = 1;  // outside a unary input alphabet
    CHECK_THROWS_AS(transmit(x, CondDist({1}, 2, {0.5, 0.5}),
                             rng.stream(StreamKind::Channel, 0, 0)),
                    std::out_of_range);
}
