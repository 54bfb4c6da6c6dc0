#include <cmath>
#include <vector>

#include <doctest.h>

#include "coordsim/channelsim.hpp"
#include "coordsim/metrics.hpp"
#include "coordsim/probmodel.hpp"

using namespace coordsim;

namespace {

const std::vector<std::string> kAB = {"A", "B"};

std::vector<double> random_dist(int size, Substream& s) {
    std::vector<double> p(size);
    double total = 0;
    for (double& v : p) {
        v = -std::log(1.0 - s.draw());  // exponential spacings give a uniform simplex point
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

}  // namespace

TEST_CASE("types count joint occurrences") {
    // Pairs ((0,0),(0,1),(0,0),(0,1)): half mass each on (0,0) and (0,1).
    SymbolBlock a({0, 0, 0, 0}, 1);
    SymbolBlock b({0, 1, 0, 1}, 2);
    const std::vector<int> dims = {1, 2};
    EmpiricalType t = type_of(kAB, dims, {{&a}, {&b}});
    CHECK(t.total() == 4);
    CHECK(t.normalized() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("pooling identical blocks changes nothing") {
    SymbolBlock a({0, 1, 1, 0}, 2);
    SymbolBlock b({1, 1, 0, 0}, 2);
    const std::vector<int> dims = {2, 2};
    EmpiricalType one = type_of(kAB, dims, {{&a}, {&b}});
    EmpiricalType three = type_of(kAB, dims, {{&a, &a, &a}, {&b, &b, &b}});
    CHECK(one.normalized() == three.normalized());
    CHECK(three.total() == 12);
}

TEST_CASE("pooled distance is at most the average of the parts") {
    SymbolBlock a1({0, 0, 1, 1}, 2), b1({0, 1, 0, 1}, 2);
    SymbolBlock a2({1, 1, 1, 0}, 2), b2({0, 0, 0, 0}, 2);
    const std::vector<int> dims = {2, 2};
    JointDist target(kAB, dims, {0.25, 0.25, 0.25, 0.25});

    const double v1 = variational_distance(type_of(kAB, dims, {{&a1}, {&b1}}).distribution(),
                                           target);
    const double v2 = variational_distance(type_of(kAB, dims, {{&a2}, {&b2}}).distribution(),
                                           target);
    const double pooled = variational_distance(
        type_of(kAB, dims, {{&a1, &a2}, {&b1, &b2}}).distribution(), target);
    CHECK(pooled <= 0.5 * v1 + 0.5 * v2 + 1e-12);
}

TEST_CASE("type construction is position-permutation invariant") {
    RandomnessStreams rng(21);
    Substream s = rng.stream(StreamKind::Source, 0, 0);
    const int n = 64;
    std::vector<int> av(n), bv(n);
    for (int t = 0; t < n; ++t) {
        av[t] = s.draw_bit();
        bv[t] = static_cast<int>(s.draw() * 3);
    }
    std::vector<int> ar(av.rbegin(), av.rend()), br(bv.rbegin(), bv.rend());
    SymbolBlock a(av, 2), b(bv, 3), arev(ar, 2), brev(br, 3);
    const std::vector<int> dims = {2, 3};
    CHECK(type_of(kAB, dims, {{&a}, {&b}}).normalized() ==
          type_of(kAB, dims, {{&arev}, {&brev}}).normalized());
}

TEST_CASE("type input validation") {
    SymbolBlock a({0, 1}, 2), b({0, 1, 0}, 2);
    const std::vector<int> dims = {2, 2};
    CHECK_THROWS_AS(type_of(kAB, dims, {{&a}, {&b}}), std::invalid_argument);
    CHECK_THROWS_AS(type_of(kAB, dims, {{&a}}), std::invalid_argument);
}

TEST_CASE("variational distance definition") {
    CHECK(variational_distance(FiniteDist::bernoulli(0.3).probs(),
                               FiniteDist::bernoulli(0.3).probs()) == doctest::Approx(0.0));
    CHECK(variational_distance(FiniteDist::bernoulli(0.5).probs(),
                               std::vector<double>{0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(variational_distance(FiniteDist::bernoulli(0.3).probs(),
                               FiniteDist::bernoulli(0.7).probs()) == doctest::Approx(0.8));
}

TEST_CASE("variational distance is a metric") {
    RandomnessStreams rng(22);
    Substream s = rng.stream(StreamKind::Source, 0, 0);
    for (int rep = 0; rep < 500; ++rep) {
        auto p = random_dist(5, s);
        auto q = random_dist(5, s);
        auto r = random_dist(5, s);
        const double pq = variational_distance(p, q);
        CHECK(pq == doctest::Approx(variational_distance(q, p)).epsilon(1e-12));
        CHECK(pq >= 0.0);
        CHECK(pq <= 2.0 + 1e-12);
        CHECK(variational_distance(p, p) == doctest::Approx(0.0));
        CHECK(pq <= variational_distance(p, r) + variational_distance(r, q) + 1e-12);
    }
}

TEST_CASE("divergence definition") {
    CHECK(kl_divergence(FiniteDist::bernoulli(0.4).probs(),
                        FiniteDist::bernoulli(0.4).probs()) == doctest::Approx(0.0));
    const double expected = 0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25);
    CHECK(kl_divergence(FiniteDist::bernoulli(0.5).probs(),
                        FiniteDist::bernoulli(0.25).probs()) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::isinf(kl_divergence(std::vector<double>{0.5, 0.5},
                                   std::vector<double>{1.0, 0.0})));
}

TEST_CASE("pinsker holds on random pairs") {
    RandomnessStreams rng(23);
    Substream s = rng.stream(StreamKind::Source, 0, 0);
    for (int rep = 0; rep < 10000; ++rep) {
        auto p = random_dist(4, s);
        auto q = random_dist(4, s);
        const double v = variational_distance(p, q);
        const double d = kl_divergence(p, q);
        CHECK(v <= std::sqrt(2 * std::log(2.0) * d) + 1e-12);
    }
}

TEST_CASE("marginal distance never exceeds joint distance") {
    RandomnessStreams rng(24);
    Substream s = rng.stream(StreamKind::Source, 0, 0);
    const std::vector<int> dims = {3, 4};
    const std::vector<std::string> keep = {"A"};
    for (int rep = 0; rep < 200; ++rep) {
        JointDist p(kAB, dims, random_dist(12, s));
        JointDist q(kAB, dims, random_dist(12, s));
        CHECK(variational_distance(p.marginal(keep), q.marginal(keep)) <=
              variational_distance(p, q) + 1e-12);
    }
}

TEST_CASE("coordination probability estimates") {
    std::vector<double> tight = {0.01, 0.02, 0.005, 0.03};
    CoordinationEstimate e1 = coordination_probability(tight, 0.15);
    CHECK(e1.fraction == doctest::Approx(0.0));
    CHECK(e1.num_runs == 4);
    CHECK(e1.ci_low >= 0.0);
    CHECK(e1.ci_high > 0.0);  // Wilson interval keeps mass away from certainty

    std::vector<double> wide = {1.9, 0.1, 1.8, 0.2};
    CHECK(coordination_probability(wide, 2.0).fraction == doctest::Approx(0.0));
    CoordinationEstimate e2 = coordination_probability(wide, 0.5);
    CHECK(e2.fraction == doctest::Approx(0.5));
    CHECK(e2.ci_low < 0.5);
    CHECK(e2.ci_high > 0.5);
    CHECK_THROWS_AS(coordination_probability({}, 0.1), std::invalid_argument);
}

TEST_CASE("distribution distances accept joint laws") {
    JointDist p(kAB, {2, 2}, {0.25, 0.25, 0.25, 0.25});
    JointDist q(kAB, {2, 2}, {0.5, 0.0, 0.25, 0.25});
    CHECK(variational_distance(p, q) == doctest::Approx(0.5));
    CHECK(std::isinf(kl_divergence(p, q)));
    CHECK(kl_divergence(q, p) > 0.0);
}
