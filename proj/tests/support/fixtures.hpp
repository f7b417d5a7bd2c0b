#pragma once

// Shared test fixtures: the eight-frame single-group lifecycle scenario and a
// seeded synthetic network with planted group evolution.

#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gevo/grouping.hpp"
#include "gevo/temporal_network.hpp"

namespace fixtures {

/// Eight-frame scenario exercising the full event vocabulary exactly once
/// per Table-style storyline: a group forms (frame 2), grows (3), splits (4),
/// its larger fragment shrinks (5), both fragments continue (6), everything
/// merges with a newly formed third group (7), and the merged group dissolves
/// (8). Two background groups with engineered partial overlaps provide the
/// extra matches the split/merge rules require without emitting events of
/// their own.
struct LifecycleFixture {
    std::vector<gevo::InteractionRecord> records;
    std::vector<std::tuple<int, std::string, std::string>> group_rows;  // frame, group, node
    gevo::WindowPlan plan{1.0, 1.0, 1.0};

    LifecycleFixture() {
        auto arc = [&](const std::string& a, const std::string& b, int frame) {
            records.push_back({a, b, static_cast<double>(frame), 1.0});
        };
        auto both = [&](const std::string& a, const std::string& b, int frame) {
            arc(a, b, frame);
            arc(b, a, frame);
        };
        auto cycle = [&](const std::vector<std::string>& order, int frame) {
            for (std::size_t i = 0; i < order.size(); ++i)
                both(order[i], order[(i + 1) % order.size()], frame);
        };
        auto clique = [&](const std::vector<std::string>& members, int frame) {
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i + 1; j < members.size(); ++j)
                    both(members[i], members[j], frame);
        };
        auto group = [&](int frame, const std::string& id, const std::vector<std::string>& nodes) {
            for (const std::string& node : nodes) group_rows.emplace_back(frame, id, node);
        };

        // frame 1: no activity, no groups (the group story starts at frame 2)

        // frame 2: the focal group, a symmetric 7-cycle (uniform SP)
        cycle({"a1", "a2", "a3", "a4", "a5", "a6", "a7"}, 2);
        group(2, "1", {"a1", "a2", "a3", "a4", "a5", "a6", "a7"});

        // frame 3: grown to 10 members. The cycle order keeps a1..a4 pairwise
        // non-adjacent so the background group's induced subgraph is a pure
        // hub-and-spokes star around h.
        cycle({"a1", "a5", "a2", "a6", "a3", "a7", "a4", "b1", "b2", "b3"}, 3);
        both("h", "a1", 3);
        both("h", "a2", 3);
        both("h", "a3", 3);
        both("h", "a4", 3);
        group(3, "1", {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "b1", "b2", "b3"});
        group(3, "2", {"a1", "a2", "a3", "a4", "h"});  // second matcher for the split fragment

        // frame 4: the split. Fragment "1" keeps a heavy 4-core plus two light
        // satellites; fragment "2" carries two old members and three new ones,
        // landing in the gray zone (no event of its own).
        clique({"a1", "a2", "a3", "a4"}, 4);
        arc("a5", "a1", 4);
        arc("a5", "a2", 4);
        arc("b1", "a3", 4);
        arc("b1", "a4", 4);
        cycle({"a6", "c1", "a7", "c2", "c3"}, 4);
        group(4, "1", {"a1", "a2", "a3", "a4", "a5", "b1"});
        group(4, "2", {"a6", "a7", "c1", "c2", "c3"});

        // frame 5: the larger fragment shrinks by one light member
        cycle({"a1", "a2", "a3", "a4", "a5"}, 5);
        cycle({"a6", "c1", "a7", "c2", "c3"}, 5);
        group(5, "1", {"a1", "a2", "a3", "a4", "a5"});
        group(5, "2", {"a6", "a7", "c1", "c2", "c3"});

        // frame 6: both fragments continue, a third group forms. The first
        // fragment's relations now concentrate SP on a1..a3 so the frame-7
        // matcher group can pass the forward threshold.
        clique({"a1", "a2", "a3"}, 6);
        arc("a4", "a1", 6);
        arc("a4", "a2", 6);
        arc("a5", "a2", 6);
        arc("a5", "a3", 6);
        cycle({"a6", "c1", "a7", "c2", "c3"}, 6);
        clique({"d1", "d2", "d3"}, 6);
        group(6, "1", {"a1", "a2", "a3", "a4", "a5"});
        group(6, "2", {"a6", "a7", "c1", "c2", "c3"});
        group(6, "3", {"d1", "d2", "d3"});

        // frame 7: the merge target takes the whole first fragment plus parts
        // of the others; the star around y is the second matcher that turns
        // the transition into a merge.
        cycle({"a1", "a4", "a2", "a5", "a3", "a6", "a7", "d1", "d2"}, 7);
        both("y", "a1", 7);
        both("y", "a2", 7);
        both("y", "a3", 7);
        group(7, "1", {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "d1", "d2"});
        group(7, "2", {"a1", "a2", "a3", "y"});

        // frame 8: only an unrelated triangle remains; the merged group
        // dissolves while the frame-7 matcher exits silently through it.
        clique({"y", "z1", "z2"}, 8);
        group(8, "1", {"y", "z1", "z2"});
    }

    void write_edges(const std::filesystem::path& path) const {
        gevo::DelimitedWriter w(path, ',');
        for (const auto& rec : records)
            w.row({rec.source, rec.target, gevo::format_double(rec.timestamp)});
        w.flush_and_check();
    }

    void write_groups(const std::filesystem::path& path) const {
        gevo::DelimitedWriter w(path, ',');
        w.row({"frame_index", "group_id", "node_identifier"});
        for (const auto& [frame, id, node] : group_rows)
            w.row({std::to_string(frame), id, node});
        w.flush_and_check();
    }

    gevo::TemporalNetwork build_network() const {
        return gevo::build_frames(records, plan);
    }

    std::vector<gevo::GroupSet> build_groupsets(const gevo::TemporalNetwork& net) const {
        std::vector<gevo::GroupSet> sets(net.frame_count());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            sets[i].frame_index = static_cast<int>(i + 1);
            sets[i].detector = gevo::Detector::external;
        }
        std::map<std::pair<int, std::string>, std::vector<gevo::NodeId>> staged;
        for (const auto& [frame, id, node] : group_rows)
            staged[{frame, id}].push_back(*net.nodes.id_of(node));
        for (auto& [key, members] : staged) {
            std::sort(members.begin(), members.end());
            sets[static_cast<std::size_t>(key.first - 1)].groups.push_back(
                {key.second, std::move(members)});
        }
        for (auto& set : sets)
            std::sort(set.groups.begin(), set.groups.end(),
                      [](const gevo::Group& a, const gevo::Group& b) {
                          return gevo::shortlex_less(a.id, b.id);
                      });
        return sets;
    }
};

/// Synthetic temporal network with planted group evolution: groups continue,
/// grow, shrink, split, merge, dissolve and form across frames, with ring +
/// random intra-group relations and background noise. Fully determined by the
/// seed.
struct SyntheticNetwork {
    gevo::TemporalNetwork network;
    std::vector<gevo::GroupSet> groupsets;
};

inline SyntheticNetwork make_planted_evolution(std::uint64_t seed, std::size_t n_nodes = 1000,
                                               int n_frames = 14) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

    std::vector<std::string> names(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "n%04zu", i);
        names[i] = buf;
    }

    // membership per frame: disjoint groups over the node universe
    std::vector<std::vector<std::vector<std::size_t>>> frame_groups(static_cast<std::size_t>(n_frames));
    std::vector<std::vector<std::size_t>> current;
    std::vector<std::size_t> pool(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) pool[i] = i;
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[pick(i)]);

    std::size_t cursor = 0;
    auto take_nodes = [&](std::size_t count) {
        std::vector<std::size_t> taken;
        while (taken.size() < count && cursor < pool.size()) taken.push_back(pool[cursor++]);
        return taken;
    };
    for (int g = 0; g < 25; ++g) {
        auto taken = take_nodes(8 + pick(25));
        if (taken.size() >= 4) current.push_back(std::move(taken));
    }

    for (int f = 0; f < n_frames; ++f) {
        frame_groups[static_cast<std::size_t>(f)] = current;
        if (f + 1 == n_frames) break;
        std::vector<std::vector<std::size_t>> next;
        std::vector<std::size_t> released;
        for (std::size_t g = 0; g < current.size(); ++g) {
            std::vector<std::size_t> members = current[g];
            std::size_t roll = pick(100);
            if (roll >= 65 && roll < 80 && members.size() <= 5) roll = 10;   // too small to shrink
            if (roll >= 80 && roll < 88 && members.size() < 10) roll = 10;   // too small to split
            if (roll >= 88 && roll < 94 && g + 1 >= current.size()) roll = 10;  // no merge partner
            if (roll < 50) {  // continue unchanged
                next.push_back(members);
            } else if (roll < 65) {  // grow
                auto extra = take_nodes(1 + pick(5));
                members.insert(members.end(), extra.begin(), extra.end());
                next.push_back(members);
            } else if (roll < 80) {  // shrink
                std::size_t keep = std::max<std::size_t>(4, members.size() - 1 - pick(4));
                for (std::size_t i = keep; i < members.size(); ++i) released.push_back(members[i]);
                members.resize(keep);
                next.push_back(members);
            } else if (roll < 88) {  // split in two
                std::size_t cut = members.size() / 2;
                next.emplace_back(members.begin(), members.begin() + static_cast<long>(cut));
                next.emplace_back(members.begin() + static_cast<long>(cut), members.end());
            } else if (roll < 94) {  // merge with the next group
                std::vector<std::size_t> merged = members;
                merged.insert(merged.end(), current[g + 1].begin(), current[g + 1].end());
                next.push_back(merged);
                ++g;  // the partner was consumed
            } else {  // dissolve: members go idle
                for (std::size_t node : members) released.push_back(node);
            }
        }
        if (pick(100) < 60) {  // occasionally form a brand-new group
            auto fresh = take_nodes(6 + pick(10));
            if (fresh.size() >= 4) next.push_back(fresh);
        }
        for (std::size_t node : released)
            if (pick(4) == 0 && cursor > 0) pool[--cursor] = node;  // some return to the pool
        current = std::move(next);
    }

    // relations: ring over each group plus random intra-group arcs + noise
    std::vector<gevo::InteractionRecord> records;
    for (int f = 0; f < n_frames; ++f) {
        const double t = static_cast<double>(f + 1);
        for (const auto& members : frame_groups[static_cast<std::size_t>(f)]) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                records.push_back({names[members[i]], names[members[(i + 1) % members.size()]], t, 1.0});
                records.push_back({names[members[(i + 1) % members.size()]], names[members[i]], t, 1.0});
            }
            for (std::size_t extra = 0; extra < members.size(); ++extra) {
                std::size_t a = members[pick(members.size())];
                std::size_t b = members[pick(members.size())];
                if (a != b) records.push_back({names[a], names[b], t, 1.0});
            }
        }
        for (std::size_t noise = 0; noise < n_nodes / 10; ++noise) {
            std::size_t a = pick(n_nodes), b = pick(n_nodes);
            if (a != b) records.push_back({names[a], names[b], t, 1.0});
        }
    }

    SyntheticNetwork result;
    result.network = gevo::build_frames(records, gevo::WindowPlan{1.0, 1.0, 1.0});
    result.groupsets.resize(static_cast<std::size_t>(n_frames));
    for (int f = 0; f < n_frames; ++f) {
        gevo::GroupSet& set = result.groupsets[static_cast<std::size_t>(f)];
        set.frame_index = f + 1;
        set.detector = gevo::Detector::external;
        const auto& groups = frame_groups[static_cast<std::size_t>(f)];
        for (std::size_t g = 0; g < groups.size(); ++g) {
            gevo::Group group;
            group.id = std::to_string(g + 1);
            for (std::size_t node : groups[g])
                group.members.push_back(*result.network.nodes.id_of(names[node]));
            std::sort(group.members.begin(), group.members.end());
            group.members.erase(std::unique(group.members.begin(), group.members.end()),
                                group.members.end());
            set.groups.push_back(std::move(group));
        }
    }
    return result;
}

/// Scratch directory helper: a fresh directory under the system temp path.
inline std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
