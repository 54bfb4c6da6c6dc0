#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "coordsim/channelsim.hpp"
#include "coordsim/polar.hpp"
#include "coordsim/probmodel.hpp"

using namespace coordsim;

namespace {

// Independent dense-matrix reference: build the transform by Kronecker-squaring
// [[1,0],[1,1]] and multiply over GF(2).
std::vector<std::vector<int>> kron_matrix(int n) {
    std::vector<std::vector<int>> g = {{1}};
    while (static_cast<int>(g.size()) < n) {
        const int m = static_cast<int>(g.size());
        std::vector<std::vector<int>> h(2 * m, std::vector<int>(2 * m, 0));
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                if (g[r][c]) {
                    h[r][c] = 1;          // top-left block
                    h[m + r][c] = 1;      // bottom-left block
                    h[m + r][m + c] = 1;  // bottom-right block
                }
        g = std::move(h);
    }
    return g;
}

BitBlock matrix_transform(const BitBlock& x) {
    const auto g = kron_matrix(x.n());
    BitBlock z(x.n());
    for (int c = 0; c < x.n(); ++c) {
        int acc = 0;
        for (int r = 0; r < x.n(); ++r) acc ^= x[r] & g[r][c];
        z[c] = static_cast<Bit>(acc);
    }
    return z;
}

BitBlock random_block(int n, Substream& s) {
    BitBlock b(n);
    for (int i = 0; i < n; ++i) b[i] = s.draw_bit();
    return b;
}

}  // namespace

TEST_CASE("transform base cases") {
    CHECK(polar_transform(BitBlock(std::vector<Bit>{1})).bits == std::vector<Bit>{1});
    CHECK(polar_transform(BitBlock({1, 0})).bits == std::vector<Bit>{1, 0});
    CHECK(polar_transform(BitBlock({0, 1})).bits == std::vector<Bit>{1, 1});
}

TEST_CASE("transform equals the dense matrix reference") {
    RandomnessStreams rng(11);
    for (int n : {1, 2, 4, 8, 16, 32}) {
        Substream s = rng.stream(StreamKind::Source, 1, n);
        for (int rep = 0; rep < 8; ++rep) {
            BitBlock x = random_block(n, s);
            CHECK(polar_transform(x).bits == matrix_transform(x).bits);
        }
    }
}

TEST_CASE("transform is a linear involution at every supported size") {
    RandomnessStreams rng(12);
    for (int n = 1; n <= 1024; n *= 2) {
        Substream s = rng.stream(StreamKind::Source, 2, n);
        BitBlock a = random_block(n, s);
        BitBlock b = random_block(n, s);
        BitBlock ta = polar_transform(a);
        BitBlock tb = polar_transform(b);
        CHECK(polar_transform(ta).bits == a.bits);

        BitBlock sum(n), tsum(n);
        for (int i = 0; i < n; ++i) {
            sum[i] = a[i] ^ b[i];
            tsum[i] = ta[i] ^ tb[i];
        }
        CHECK(polar_transform(sum).bits == tsum.bits);
    }
    CHECK_THROWS_AS(polar_transform(BitBlock(3)), std::invalid_argument);
    CHECK_THROWS_AS(polar_transform(BitBlock(0)), std::invalid_argument);
}

TEST_CASE("single-letter conditional is a passthrough at n = 1") {
    const double p = 0.11;
    ScModel model = ScModel::unconditional(FiniteDist::bernoulli(p));
    SymbolBlock side = SymbolBlock::constant(1, 0, 1);
    CHECK(sc_prefix_probability(model, side, {}, 1) == doctest::Approx(1 - p).epsilon(1e-12));
}

TEST_CASE("first conditional at n = 2 is the parity law") {
    const double p = 0.11;
    ScModel model = ScModel::unconditional(FiniteDist::bernoulli(p));
    SymbolBlock side = SymbolBlock::constant(2, 0, 1);
    // First transformed bit is the parity of two draws.
    CHECK(sc_prefix_probability(model, side, {}, 1) ==
          doctest::Approx(p * p + (1 - p) * (1 - p)).epsilon(1e-12));
}

TEST_CASE("branch probabilities are complementary") {
    ScModel model(CondDist({2}, 2, {0.7, 0.3, 0.2, 0.8}));
    RandomnessStreams rng(13);
    for (int n : {2, 4, 8, 16}) {
        Substream s = rng.stream(StreamKind::Source, 3, n);
        std::vector<int> w(n);
        for (int t = 0; t < n; ++t) w[t] = s.draw_bit();
        ScProcess proc(model, SymbolBlock(w, 2));
        for (int j = 1; j <= n; ++j) {
            auto law = proc.law();
            CHECK(law[0] + law[1] == doctest::Approx(1.0).epsilon(1e-10));
            proc.commit(s.draw() < law[0] ? 0 : 1);
        }
    }
}

TEST_CASE("conditionals multiply to the exact block law") {
    // Chain rule: walking all conditionals of a realized z must reproduce the
    // product law of the pre-transform bits, exactly recoverable because the
    // transform is invertible.
    ScModel model(CondDist({2}, 2, {0.8, 0.2, 0.35, 0.65}));
    RandomnessStreams rng(14);
    for (int n : {2, 4, 8}) {
        Substream s = rng.stream(StreamKind::Source, 4, n);
        std::vector<int> w(n);
        for (int t = 0; t < n; ++t) w[t] = s.draw_bit();
        SymbolBlock side(w, 2);

        ScProcess proc(model, side);
        BitBlock z(n);
        double chain = 1.0;
        for (int j = 1; j <= n; ++j) {
            auto law = proc.law();
            const Bit b = s.draw() < law[0] ? 0 : 1;
            chain *= law[b];
            proc.commit(b);
            z[j - 1] = b;
        }

        BitBlock x = polar_transform(z);
        double direct = 1.0;
        for (int t = 0; t < n; ++t) direct *= model.law(w[t])[x[t]];
        CHECK(chain == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("uniform input stays uniform at every position") {
    ScModel model = ScModel::unconditional(FiniteDist::bernoulli(0.5));
    SymbolBlock side = SymbolBlock::constant(64, 0, 1);
    RandomnessStreams rng(15);
    Substream s = rng.stream(StreamKind::Source, 5, 0);
    ScProcess proc(model, side);
    for (int j = 1; j <= 64; ++j) {
        CHECK(proc.prob0() == doctest::Approx(0.5).epsilon(1e-12));
        proc.commit(s.draw_bit());
    }
}

TEST_CASE("likelihood ratios") {
    // Symmetric model, no evidence: ratio exactly 1.
    ScModel uniform = ScModel::unconditional(FiniteDist::bernoulli(0.5));
    CHECK(sc_llr(uniform, SymbolBlock::constant(4, 0, 1), {}, 1) == doctest::Approx(1.0));

    // Certainty pins the ratio at +infinity.
    ScModel sure = ScModel::unconditional(FiniteDist({1.0, 0.0}));
    CHECK(std::isinf(sc_llr(sure, SymbolBlock::constant(2, 0, 1), {}, 1)));

    // Ratio is the quotient of the two branch probabilities.
    ScModel biased = ScModel::unconditional(FiniteDist::bernoulli(0.11));
    SymbolBlock side = SymbolBlock::constant(2, 0, 1);
    const std::vector<Bit> prefix = {1};
    const double p0 = sc_prefix_probability(biased, side, prefix, 2);
    CHECK(sc_llr(biased, side, prefix, 2) == doctest::Approx(p0 / (1 - p0)).epsilon(1e-10));
}

TEST_CASE("impossible prefixes raise or flag per policy") {
    // Deterministic zero source: committing a 1 contradicts the model.
    ScModel sure = ScModel::unconditional(FiniteDist({1.0, 0.0}));
    SymbolBlock side = SymbolBlock::constant(2, 0, 1);

    ScProcess strict(sure, side, ScProcess::ZeroPolicy::Throw);
    CHECK(strict.prob0() == doctest::Approx(1.0));
    CHECK_THROWS_AS(strict.commit(1), ZeroProbabilityError);

    ScProcess lenient(sure, side, ScProcess::ZeroPolicy::FlagUniform);
    lenient.commit(1);
    CHECK(lenient.flagged());
    auto law = lenient.law();
    CHECK(law[0] == doctest::Approx(0.5));
}

TEST_CASE("engine argument validation") {
    ScModel model = ScModel::unconditional(FiniteDist::bernoulli(0.3));
    SymbolBlock side = SymbolBlock::constant(4, 0, 1);
    CHECK_THROWS_AS(sc_prefix_probability(model, side, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(sc_prefix_probability(model, side, {}, 5), std::invalid_argument);
    CHECK_THROWS_AS(sc_prefix_probability(model, SymbolBlock::constant(3, 0, 1), {}, 1),
                    std::invalid_argument);

    ScProcess proc(model, side);
    proc.commit(0);
    CHECK(proc.position() == 2);
    CHECK(proc.committed() == std::vector<Bit>{0});
}

TEST_CASE("symbol block pairing matches kernel row order") {
    SymbolBlock a({1, 0, 1}, 2);
    SymbolBlock b({2, 1, 0}, 3);
    SymbolBlock z = zip_symbols(a, b);
    CHECK(z.alphabet_size == 6);
    // First coordinate varies slowest: pair (a, b) = a * |B| + b.
    CHECK(z.symbols == std::vector<int>{5, 1, 3});

    BitBlock bits({1, 0, 1});
    SymbolBlock sb = SymbolBlock::from_bits(bits);
    CHECK(sb.alphabet_size == 2);
    CHECK(sb.symbols == std::vector<int>{1, 0, 1});
}
