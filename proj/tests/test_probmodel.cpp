#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "coordsim/probmodel.hpp"
#include "coordsim/scenario.hpp"

using namespace coordsim;

namespace {

const std::vector<std::string> kS = {"S"};
const std::vector<std::string> kX = {"X"};
const std::vector<std::string> kY = {"Y"};
const std::vector<std::string> kU = {"U"};
const std::vector<std::string> kXU = {"X", "U"};

// X ⊕ S computed by a deterministic kernel.
CondDist xor_kernel() {
    return CondDist({2, 2}, 2, {1, 0, 0, 1, 0, 1, 1, 0});
}

CondDist copy_u_kernel(int y_size) {
    std::vector<double> t;
    for (int u = 0; u < 2; ++u)
        for (int y = 0; y < y_size; ++y)
            for (int shat = 0; shat < 2; ++shat) t.push_back(shat == u ? 1.0 : 0.0);
    return CondDist({2, y_size}, 2, std::move(t));
}

}  // namespace

TEST_CASE("finite distributions validate and renormalize") {
    FiniteDist p({0.25, 0.75});
    CHECK(p.size() == 2);
    CHECK(p.prob(1) == doctest::Approx(0.75));

    // Drift within tolerance is silently scaled back to a unit sum.
    FiniteDist q({0.5, 0.5 + 4e-7});
    CHECK(q.prob(0) + q.prob(1) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(FiniteDist({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDist({1.2, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDist({}), std::invalid_argument);

    CHECK(FiniteDist::uniform(4).prob(2) == doctest::Approx(0.25));
    CHECK(FiniteDist::bernoulli(0.3).prob(1) == doctest::Approx(0.3));
}

TEST_CASE("conditional kernels index rows first-input-slowest") {
    CondDist bsc = CondDist::bsc(0.1);
    CHECK(bsc.prob(std::vector<int>{0}, 0) == doctest::Approx(0.9));
    CHECK(bsc.prob(std::vector<int>{1}, 0) == doctest::Approx(0.1));

    // Two inputs: row of (x, s) must sit at x * |S| + s.
    CondDist k({2, 3}, 2,
               {0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, 0.5, 0.5, 0.6, 0.4});
    CHECK(k.num_rows() == 6);
    CHECK(k.prob(std::vector<int>{1, 2}, 0) == doctest::Approx(0.6));
    CHECK(k.prob(std::vector<int>{0, 1}, 1) == doctest::Approx(0.8));

    CHECK_THROWS_AS(CondDist({2}, 2, {0.5, 0.6, 0.5, 0.5}), std::invalid_argument);
    CHECK(CondDist::identity(3).prob(std::vector<int>{2}, 2) == doctest::Approx(1.0));
}

TEST_CASE("joint law of deterministic components is a point mass") {
    CoordinationSpec spec(FiniteDist({1.0, 0.0}),  // S = 0 always
                          FiniteDist({0.0, 1.0}),  // X = 1 always
                          xor_kernel(),            // U = X xor S = 1
                          CondDist::identity(2),   // Y = X
                          copy_u_kernel(2));       // Shat = U
    JointDist j = joint(spec);
    // Forced tuple: (s, x, u, y, shat) = (0, 1, 1, 1, 1).
    CHECK(j.prob(std::vector<int>{0, 1, 1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    double total = 0;
    for (double v : j.probs()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("joint marginals reproduce the component inputs exactly") {
    const Scenario sc = scenario_preset("bsc-scenario");
    JointDist j = joint(sc.spec);

    JointDist ms = j.marginal(kS);
    for (int s = 0; s < sc.spec.s_size(); ++s)
        CHECK(ms.prob(std::vector<int>{s}) ==
              doctest::Approx(sc.spec.source.prob(s)).epsilon(1e-12));

    JointDist mx = j.marginal(kX);
    for (int x = 0; x < 2; ++x)
        CHECK(mx.prob(std::vector<int>{x}) ==
              doctest::Approx(sc.spec.input.prob(x)).epsilon(1e-12));
}

TEST_CASE("joint law matches a direct product enumeration") {
    // S~Bern(.5), X~Bern(.5), U = X xor S deterministically, BSC(0.1), Shat = U.
    CoordinationSpec spec(FiniteDist::bernoulli(0.5), FiniteDist::bernoulli(0.5), xor_kernel(),
                         CondDist::bsc(0.1), copy_u_kernel(2));
    JointDist j = joint(spec);
    REQUIRE(j.probs().size() == 32);
    for (int s = 0; s < 2; ++s)
        for (int x = 0; x < 2; ++x)
            for (int u = 0; u < 2; ++u)
                for (int y = 0; y < 2; ++y)
                    for (int shat = 0; shat < 2; ++shat) {
                        const double direct = 0.5 * 0.5 * (u == (x ^ s) ? 1.0 : 0.0) *
                                              (y == x ? 0.9 : 0.1) * (shat == u ? 1.0 : 0.0);
                        CHECK(j.prob(std::vector<int>{s, x, u, y, shat}) ==
                              doctest::Approx(direct).epsilon(1e-12));
                    }
}

TEST_CASE("mutual information basics") {
    const Scenario sc = scenario_preset("bsc-scenario");
    JointDist j = joint(sc.spec);

    // S was drawn independently of X.
    CHECK(mutual_information(j, kX, kS) == doctest::Approx(0.0).epsilon(1e-10));

    // Identity channel carries one full bit.
    CoordinationSpec noiseless(FiniteDist::bernoulli(0.5), FiniteDist::bernoulli(0.5),
                               xor_kernel(), CondDist::identity(2), copy_u_kernel(2));
    JointDist jn = joint(noiseless);
    CHECK(mutual_information(jn, kX, kY) == doctest::Approx(1.0).epsilon(1e-10));

    // BSC(0.1) with uniform input: I(X;Y) = 1 - h2(0.1).
    CHECK(mutual_information(j, kX, kY) ==
          doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-10));

    // Symmetry of the two groups.
    CHECK(mutual_information(j, kY, kX) ==
          doctest::Approx(mutual_information(j, kX, kY)).epsilon(1e-12));
}

TEST_CASE("entropy utilities") {
    CHECK(entropy(FiniteDist::uniform(4)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(entropy(FiniteDist({1.0, 0.0})) == doctest::Approx(0.0));
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_entropy(0.0) == doctest::Approx(0.0));
    CHECK(binary_entropy(0.25) ==
          doctest::Approx(-0.25 * std::log2(0.25) - 0.75 * std::log2(0.75)).epsilon(1e-12));
}

TEST_CASE("region membership") {
    // Constant U: nothing to convey, always inside whatever the channel.
    CondDist const_u({2, 2}, 2, {1, 0, 1, 0, 1, 0, 1, 0});
    CoordinationSpec constant(FiniteDist::bernoulli(0.5), FiniteDist::bernoulli(0.5), const_u,
                              CondDist::bsc(0.3), copy_u_kernel(2));
    RegionReport r1 = check_region(constant);
    CHECK(r1.rate_needed == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r1.inside);

    // Noiseless channel fits the preset's noisy-parity target comfortably.
    const Scenario noiseless = scenario_preset("noiseless-scenario");
    RegionReport r2 = check_region(noiseless.spec);
    CHECK(r2.rate_available == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r2.rate_needed ==
          doctest::Approx(1.0 - binary_entropy(0.25)).epsilon(1e-10));
    CHECK(r2.inside);

    // U = S through a pure-noise channel: one full bit needed, zero available.
    const Scenario bad = scenario_preset("infeasible-scenario");
    RegionReport r3 = check_region(bad.spec);
    CHECK(r3.rate_needed == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r3.rate_available == doctest::Approx(0.0).epsilon(1e-10));
    CHECK_FALSE(r3.inside);
}

TEST_CASE("structural identities of the factorization") {
    const Scenario sc = scenario_preset("bsc-scenario");
    JointDist j = joint(sc.spec);

    // I(X,U; S) collapses to I(U; S | X) because S is independent of X.
    CHECK(mutual_information(j, kXU, kS) ==
          doctest::Approx(conditional_mutual_information(j, kU, kS, kX)).epsilon(1e-10));
    // I(X,U; Y) collapses to I(X; Y) because (U, S) - X - Y is Markov.
    CHECK(mutual_information(j, kXU, kY) ==
          doctest::Approx(mutual_information(j, kX, kY)).epsilon(1e-10));

    RegionReport r = check_region(sc.spec);
    CHECK(r.rate_needed == doctest::Approx(r.i_xu_s).epsilon(1e-12));
    CHECK(r.rate_available == doctest::Approx(r.i_xu_y).epsilon(1e-12));
}

TEST_CASE("conditional entropy and chain rule") {
    const Scenario sc = scenario_preset("bsc-scenario");
    JointDist j = joint(sc.spec);
    const std::vector<std::string> xy = {"X", "Y"};
    const double h_xy = entropy(j, xy);
    const double h_x = entropy(j, kX);
    const double h_y_given_x = conditional_entropy(j, kY, kX);
    CHECK(h_xy == doctest::Approx(h_x + h_y_given_x).epsilon(1e-10));
    CHECK(conditional_entropy(j, kY, kX) == doctest::Approx(binary_entropy(0.1)).epsilon(1e-10));
}
