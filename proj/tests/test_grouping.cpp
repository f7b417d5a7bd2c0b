#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "gevo/grouping.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace gevo;

namespace {
const std::filesystem::path kFixtures = GEVO_FIXTURES_DIR;

Snapshot complete_graph(std::size_t n) {
    std::vector<std::tuple<NodeId, NodeId, double>> arcs;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (u != v) arcs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0);
    return make_snapshot(1, n, arcs);
}

std::set<std::vector<NodeId>> as_member_sets(const GroupSet& set) {
    std::set<std::vector<NodeId>> out;
    for (const Group& g : set.groups) out.insert(g.members);
    return out;
}
}  // namespace

TEST_CASE("cpm: complete graph collapses to one group") {
    GroupSet set = detect_groups_cpm(complete_graph(5), 4);
    REQUIRE(set.groups.size() == 1);
    CHECK(set.groups[0].members == std::vector<NodeId>{0, 1, 2, 3, 4});
}

TEST_CASE("cpm: two cliques sharing one vertex stay separate at k=4") {
    std::vector<std::tuple<NodeId, NodeId, double>> arcs;
    auto clique = [&](std::vector<NodeId> nodes) {
        for (NodeId u : nodes)
            for (NodeId v : nodes)
                if (u != v) arcs.emplace_back(u, v, 1.0);
    };
    clique({0, 1, 2, 3});
    clique({3, 4, 5, 6});
    GroupSet set = detect_groups_cpm(make_snapshot(1, 7, arcs), 4);
    REQUIRE(set.groups.size() == 2);
    CHECK(set.groups[0].members == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(set.groups[1].members == std::vector<NodeId>{3, 4, 5, 6});
    CHECK(intersection_size(set.groups[0].members, set.groups[1].members) == 1);
}

TEST_CASE("cpm: k above the largest clique yields an empty set") {
    GroupSet set = detect_groups_cpm(complete_graph(4), 5);
    CHECK(set.groups.empty());
    CHECK_THROWS_AS(detect_groups_cpm(complete_graph(4), 2), Error);
}

TEST_CASE("cpm: matches exhaustive enumeration on random graphs") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 8 + rng() % 13;
        double p = 0.2 + 0.05 * static_cast<double>(rng() % 7);
        Snapshot snap = oracle::random_undirected_snapshot(rng, n, p);
        for (int k : {3, 4}) {
            GroupSet mine = detect_groups_cpm(snap, k);
            CHECK(as_member_sets(mine) == oracle::cpm_oracle(snap, k));
            for (const Group& g : mine.groups) CHECK(g.size() >= static_cast<std::size_t>(k));
        }
    }
}

TEST_CASE("cpm: output is independent of edge input order") {
    std::mt19937_64 rng(9);
    Snapshot base = oracle::random_undirected_snapshot(rng, 14, 0.4);
    std::vector<InteractionRecord> records;
    for (std::size_t u = 0; u < base.node_count(); ++u)
        for (const Arc& arc : base.out[u])
            records.push_back({"v" + std::to_string(u), "v" + std::to_string(arc.target), 1.0, 1.0});
    TemporalNetwork forward = build_frames(records, WindowPlan{2.0, 2.0, 0.0});
    std::mt19937_64 shuffle_rng(5);
    for (std::size_t i = records.size(); i > 1; --i)
        std::swap(records[i - 1], records[shuffle_rng() % i]);
    TemporalNetwork shuffled = build_frames(records, WindowPlan{2.0, 2.0, 0.0});
    for (int k : {3, 4}) {
        GroupSet a = detect_groups_cpm(forward.frames[0], k);
        GroupSet b = detect_groups_cpm(shuffled.frames[0], k);
        CHECK(as_member_sets(a) == as_member_sets(b));
    }
}

TEST_CASE("label propagation: disconnected triangles become two groups") {
    std::vector<std::tuple<NodeId, NodeId, double>> arcs;
    for (auto [u, v] : std::vector<std::pair<NodeId, NodeId>>{
             {0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}) {
        arcs.emplace_back(u, v, 1.0);
        arcs.emplace_back(v, u, 1.0);
    }
    GroupSet set = detect_groups_labelprop(make_snapshot(1, 6, arcs), 1);
    REQUIRE(set.groups.size() == 2);
    CHECK(set.groups[0].members == std::vector<NodeId>{0, 1, 2});
    CHECK(set.groups[1].members == std::vector<NodeId>{3, 4, 5});
}

TEST_CASE("label propagation: edgeless snapshot yields singletons") {
    GroupSet set = detect_groups_labelprop(make_snapshot(1, 5, {}), 1);
    REQUIRE(set.groups.size() == 5);
    for (const Group& g : set.groups) CHECK(g.size() == 1);
}

TEST_CASE("label propagation: recovers a planted bisection") {
    std::mt19937_64 rng(2024);
    std::vector<std::tuple<NodeId, NodeId, double>> arcs;
    auto flip = [&](double p) { return static_cast<double>(rng() % 1000) / 1000.0 < p; };
    for (NodeId u = 0; u < 20; ++u)
        for (NodeId v = u + 1; v < 20; ++v) {
            bool same_block = (u < 10) == (v < 10);
            if (flip(same_block ? 0.9 : 0.05)) {
                arcs.emplace_back(u, v, 1.0);
                arcs.emplace_back(v, u, 1.0);
            }
        }
    GroupSet set = detect_groups_labelprop(make_snapshot(1, 20, arcs), 1);
    REQUIRE(set.groups.size() == 2);
    CHECK(set.groups[0].members == std::vector<NodeId>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(set.groups[1].members == std::vector<NodeId>{10, 11, 12, 13, 14, 15, 16, 17, 18, 19});
}

TEST_CASE("label propagation: deterministic per seed, partitions active nodes") {
    std::mt19937_64 rng(88);
    Snapshot snap = oracle::random_undirected_snapshot(rng, 24, 0.2);
    GroupSet a = detect_groups_labelprop(snap, 3);
    GroupSet b = detect_groups_labelprop(snap, 3);
    CHECK(as_member_sets(a) == as_member_sets(b));
    std::size_t covered = 0;
    for (const Group& g : a.groups) covered += g.size();
    CHECK(covered == snap.node_count());  // disjoint cover
}

TEST_CASE("load_groups: empty file loads empty sets") {
    IngestResult ingest = ingest_edges(kFixtures / "overlap_edges.csv");
    TemporalNetwork net = build_frames(ingest.records, WindowPlan{1.0, 1.0, 1.0});
    GroupLoadResult loaded = load_groups(kFixtures / "empty.csv", net);
    REQUIRE(loaded.sets.size() == net.frame_count());
    for (const GroupSet& set : loaded.sets) CHECK(set.groups.empty());
    CHECK(loaded.issues.empty());
}

TEST_CASE("load_groups: overlapping groups load verbatim") {
    IngestResult ingest = ingest_edges(kFixtures / "overlap_edges.csv");
    TemporalNetwork net = build_frames(ingest.records, WindowPlan{1.0, 1.0, 1.0});
    GroupLoadResult loaded = load_groups(kFixtures / "overlap_groups.csv", net);
    REQUIRE(loaded.sets.size() == 1);
    REQUIRE(loaded.sets[0].groups.size() == 2);
    CHECK(loaded.sets[0].detector == Detector::external);
    CHECK(loaded.sets[0].groups[0].size() == 3);
    CHECK(loaded.sets[0].groups[1].size() == 3);
    CHECK(intersection_size(loaded.sets[0].groups[0].members,
                            loaded.sets[0].groups[1].members) == 1);
}

TEST_CASE("load_groups: bad rows are rejected with diagnostics") {
    IngestResult ingest = ingest_edges(kFixtures / "overlap_edges.csv");
    TemporalNetwork net = build_frames(ingest.records, WindowPlan{1.0, 1.0, 1.0});
    auto dir = fixtures::fresh_dir("gevo_load_groups");
    {
        DelimitedWriter w(dir / "bad.csv", ',');
        w.row({"1", "g1", "p"});
        w.row({"1", "g1", "nobody"});   // unknown node -> rejected, group survives
        w.row({"9", "g2", "p"});        // frame out of range
        w.row({"1", "g3", "ghost"});    // lone unknown member -> group dropped
        w.flush_and_check();
    }
    GroupLoadResult loaded = load_groups(dir / "bad.csv", net);
    REQUIRE(loaded.sets.size() == 1);
    REQUIRE(loaded.sets[0].groups.size() == 1);
    CHECK(loaded.sets[0].groups[0].id == "g1");
    CHECK(loaded.dropped_groups == 1);
    REQUIRE(loaded.issues.size() == 4);  // three bad rows + one dropped-group warning
    CHECK(loaded.issues[0].line == 2);
    CHECK(loaded.issues[1].line == 3);
    CHECK(loaded.issues[2].line == 4);
}

TEST_CASE("groups round-trip through save and load") {
    fixtures::LifecycleFixture fixture;
    TemporalNetwork net = fixture.build_network();
    std::vector<GroupSet> sets = fixture.build_groupsets(net);
    auto dir = fixtures::fresh_dir("gevo_groups_roundtrip");
    save_groups(dir / "groups.csv", sets, net.nodes);
    GroupLoadResult loaded = load_groups(dir / "groups.csv", net);
    CHECK(loaded.issues.empty());
    REQUIRE(loaded.sets.size() == sets.size());
    for (std::size_t f = 0; f < sets.size(); ++f) {
        REQUIRE(loaded.sets[f].groups.size() == sets[f].groups.size());
        for (std::size_t g = 0; g < sets[f].groups.size(); ++g) {
            CHECK(loaded.sets[f].groups[g].id == sets[f].groups[g].id);
            CHECK(loaded.sets[f].groups[g].members == sets[f].groups[g].members);
        }
    }
}
