#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "orcd/topology.hpp"
#include "support/helpers.hpp"

using namespace orcd;
using test::make_topology;

TEST_CASE("neighbors follow positive-link reachability") {
    const Topology two = make_topology(2, {{1, 2, 0.5}}, {2});
    CHECK(two.neighbors(1) == std::vector<NodeId>{2});

    const Topology none = make_topology(2, {}, {2});
    CHECK(none.neighbors(1).empty());

    const Topology full =
        make_topology(4, {{1, 2, 0.3}, {1, 3, 0.3}, {1, 4, 0.3}, {2, 3, 0.3}, {2, 4, 0.3}, {3, 4, 0.3}},
                      {4});
    CHECK(full.neighbors(1) == std::vector<NodeId>{2, 3, 4});

    CHECK_THROWS_AS(full.neighbors(0), std::invalid_argument);
    CHECK_THROWS_AS(full.neighbors(5), std::invalid_argument);
}

TEST_CASE("links are directed when set directionally") {
    LinkMatrix m(2);
    m.set(1, 2, 0.7);
    const Topology t(m, {2});
    CHECK(t.neighbors(1) == std::vector<NodeId>{2});
    CHECK(t.neighbors(2).empty());
}

TEST_CASE("subset_probability matches the product form") {
    const Topology t = make_topology(3, {{1, 2, 0.5}, {1, 3, 0.5}}, {3});
    CHECK(subset_probability(t, 1, {2}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(subset_probability(t, 1, {}) == doctest::Approx(0.25).epsilon(1e-12));

    const Topology certain = make_topology(3, {{1, 2, 1.0}, {1, 3, 0.5}}, {3});
    // A certain link excluded from the subset makes the subset impossible.
    CHECK(subset_probability(certain, 1, {3}) == doctest::Approx(0.0));

    CHECK_THROWS_AS(subset_probability(t, 1, {1}), std::invalid_argument);
}

TEST_CASE("subset probabilities sum to one") {
    RngStream rng(7);
    for (int net = 0; net < 20; ++net) {
        const Topology t = test::random_connected(rng, 6, 0.5, 6);
        for (NodeId i = 1; i <= 5; ++i) {
            const auto& nbrs = t.neighbors(i);
            double total = 0.0;
            for (std::uint32_t mask = 0; mask < (1u << nbrs.size()); ++mask) {
                std::vector<NodeId> subset;
                for (std::size_t b = 0; b < nbrs.size(); ++b)
                    if (mask & (1u << b)) subset.push_back(nbrs[b]);
                total += subset_probability(t, i, subset);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample_forwarder_set degenerate probabilities") {
    RngStream rng(3);
    const Topology sure = make_topology(3, {{1, 2, 1.0}, {1, 3, 1.0}}, {3});
    for (int k = 0; k < 50; ++k)
        CHECK(sample_forwarder_set(sure, 1, rng).receivers == std::vector<NodeId>{2, 3});

    LinkMatrix m(3);
    m.set_symmetric(2, 3, 0.4);
    const Topology never(m, {3});
    for (int k = 0; k < 50; ++k) CHECK(sample_forwarder_set(never, 1, rng).receivers.empty());
}

TEST_CASE("sample_forwarder_set per-neighbor frequency within 3 sigma") {
    const Topology t = make_topology(4, {{1, 2, 0.5}, {1, 3, 0.5}, {1, 4, 0.5}}, {4});
    RngStream rng(11);
    const int samples = 100000;
    std::map<NodeId, int> hits;
    for (int s = 0; s < samples; ++s)
        for (NodeId r : sample_forwarder_set(t, 1, rng).receivers) hits[r] += 1;
    const double sigma = std::sqrt(0.5 * 0.5 / samples);
    for (NodeId j : {2, 3, 4})
        CHECK(std::abs(static_cast<double>(hits[j]) / samples - 0.5) < 3.0 * sigma);
}

TEST_CASE("sample_forwarder_set subset frequencies pass chi-square at 1e5 draws") {
    const Topology t = make_topology(5, {{1, 2, 0.7}, {1, 3, 0.4}, {1, 4, 0.55}, {1, 5, 0.25}}, {5});
    RngStream rng(23);
    const int samples = 100000;
    std::map<std::vector<NodeId>, int> counts;
    for (int s = 0; s < samples; ++s) counts[sample_forwarder_set(t, 1, rng).receivers] += 1;

    const auto& nbrs = t.neighbors(1);
    double stat = 0.0;
    int cells = 0;
    for (std::uint32_t mask = 0; mask < (1u << nbrs.size()); ++mask) {
        std::vector<NodeId> subset;
        for (std::size_t b = 0; b < nbrs.size(); ++b)
            if (mask & (1u << b)) subset.push_back(nbrs[b]);
        const double expected = samples * test::oracle_subset_prob(t, 1, subset);
        const double observed = counts.count(subset) ? counts[subset] : 0;
        if (expected > 0.0) {
            stat += (observed - expected) * (observed - expected) / expected;
            ++cells;
        }
    }
    CHECK(stat < test::chi2_crit_999(cells - 1));
}

TEST_CASE("replaying a seed reproduces identical samples") {
    const Topology t = make_topology(4, {{1, 2, 0.3}, {1, 3, 0.6}, {1, 4, 0.9}}, {4});
    RngStream a(99), b(99);
    for (int k = 0; k < 1000; ++k)
        CHECK(sample_forwarder_set(t, 1, a).receivers == sample_forwarder_set(t, 1, b).receivers);
}

TEST_CASE("validate_topology reports unreachable nodes per destination") {
    const Topology chain = make_topology(3, {{1, 2, 0.8}, {2, 3, 0.8}}, {3});
    CHECK(validate_topology(chain).valid());

    // Node 3 isolated entirely.
    const Topology isolated = make_topology(3, {{1, 2, 0.8}}, {2});
    const auto report = validate_topology(isolated);
    CHECK_FALSE(report.valid());
    CHECK(report.unreachable[0] == std::vector<NodeId>{3});
}

TEST_CASE("validate_topology follows directed reachability") {
    // p_12 > 0 but node 2 has no outgoing link (only D -> 2): both 1 and 2
    // stranded. Oracle: test-local reverse search.
    LinkMatrix m(3);
    m.set(1, 2, 0.9);
    m.set(3, 2, 0.9);
    const Topology t(m, {3});
    const auto report = validate_topology(t);

    // Independent reachability oracle (forward BFS per node).
    std::vector<NodeId> expected;
    for (NodeId i = 1; i <= 2; ++i) {
        std::vector<char> seen(4, 0);
        std::vector<NodeId> stack{i};
        seen[i] = 1;
        bool reaches = false;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            if (u == 3) {
                reaches = true;
                break;
            }
            for (NodeId v : t.neighbors(u))
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        if (!reaches) expected.push_back(i);
    }
    CHECK(expected == std::vector<NodeId>{1, 2});
    CHECK(report.unreachable[0] == expected);
}

TEST_CASE("validate_topology rejects oversized fan-out") {
    const int n = 28;
    LinkMatrix m(n);
    for (NodeId j = 2; j <= n; ++j) m.set_symmetric(1, j, 0.5);
    for (NodeId j = 2; j < n; ++j) m.set_symmetric(j, j + 1, 0.5);
    const Topology t(m, {n});
    const auto report = validate_topology(t);
    CHECK_FALSE(report.valid());
    REQUIRE(report.oversized_fanout.size() == 1);
    CHECK(report.oversized_fanout[0] == 1);
}

TEST_CASE("link matrix rejects bad input") {
    LinkMatrix m(3);
    CHECK_THROWS_AS(m.set(1, 2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(m.set(0, 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(m.set(1, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Topology(m, {}), std::invalid_argument);
    CHECK_THROWS_AS(Topology(m, {9}), std::invalid_argument);
}
