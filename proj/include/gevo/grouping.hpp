#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gevo/temporal_network.hpp"

namespace gevo {

/// A group is a nonempty vertex subset of one frame; members are sorted
/// global node ids. Ids only need to be unique within their frame.
struct Group {
    std::string id;
    std::vector<NodeId> members;

    std::size_t size() const { return members.size(); }
    bool contains(NodeId id_) const {
        return std::binary_search(members.begin(), members.end(), id_);
    }
};

enum class Detector { cpm, label_prop, external };

inline const char* detector_name(Detector d) {
    switch (d) {
        case Detector::cpm: return "cpm";
        case Detector::label_prop: return "label_prop";
        case Detector::external: return "external";
    }
    return "?";
}

struct GroupSet {
    int frame_index = 0;
    Detector detector = Detector::external;
    std::vector<Group> groups;
};

inline std::size_t intersection_size(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++count; ++i; ++j; }
    }
    return count;
}

namespace detail {

struct UnionFind {
    std::vector<std::uint32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

/// Undirected unweighted view of a snapshot: an edge exists iff at least one
/// direction carries an arc.
struct SymmetrizedGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> neighbors;  // sorted local indices
    std::vector<std::vector<bool>> adjacent;

    explicit SymmetrizedGraph(const Snapshot& snapshot) {
        n = snapshot.node_count();
        neighbors.assign(n, {});
        adjacent.assign(n, std::vector<bool>(n, false));
        for (std::size_t u = 0; u < n; ++u)
            for (const Arc& arc : snapshot.out[u]) {
                std::size_t v = arc.target;
                if (u == v || adjacent[u][v]) continue;
                adjacent[u][v] = adjacent[v][u] = true;
                neighbors[u].push_back(static_cast<std::uint32_t>(v));
                neighbors[v].push_back(static_cast<std::uint32_t>(u));
            }
        for (auto& nb : neighbors) std::sort(nb.begin(), nb.end());
    }
};

/// Bron-Kerbosch with pivoting; emits maximal cliques as sorted local indices.
class MaximalCliqueEnumerator {
public:
    explicit MaximalCliqueEnumerator(const SymmetrizedGraph& g) : g_(g) {}

    std::vector<std::vector<std::uint32_t>> run() {
        std::vector<std::uint32_t> all(g_.n);
        std::iota(all.begin(), all.end(), 0u);
        std::vector<std::uint32_t> r;
        expand(r, all, {});
        return std::move(cliques_);
    }

private:
    void expand(std::vector<std::uint32_t>& r, std::vector<std::uint32_t> p,
                std::vector<std::uint32_t> x) {
        if (p.empty() && x.empty()) {
            if (!r.empty()) cliques_.push_back(r);
            return;
        }
        std::uint32_t pivot = pick_pivot(p, x);
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t v : p)
            if (!g_.adjacent[pivot][v]) candidates.push_back(v);
        for (std::uint32_t v : candidates) {
            std::vector<std::uint32_t> p_next, x_next;
            for (std::uint32_t w : p)
                if (g_.adjacent[v][w]) p_next.push_back(w);
            for (std::uint32_t w : x)
                if (g_.adjacent[v][w]) x_next.push_back(w);
            r.push_back(v);
            expand(r, std::move(p_next), std::move(x_next));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    std::uint32_t pick_pivot(const std::vector<std::uint32_t>& p,
                             const std::vector<std::uint32_t>& x) const {
        std::uint32_t best = p.empty() ? x.front() : p.front();
        std::size_t best_count = 0;
        auto consider = [&](std::uint32_t u) {
            std::size_t count = 0;
            for (std::uint32_t v : p)
                if (g_.adjacent[u][v]) ++count;
            if (count > best_count) {
                best_count = count;
                best = u;
            }
        };
        for (std::uint32_t u : p) consider(u);
        for (std::uint32_t u : x) consider(u);
        return best;
    }

    const SymmetrizedGraph& g_;
    std::vector<std::vector<std::uint32_t>> cliques_;
};

inline void enumerate_k_subsets(const std::vector<std::uint32_t>& clique, std::size_t k,
                                std::set<std::vector<std::uint32_t>>& out) {
    std::vector<std::uint32_t> current;
    current.reserve(k);
    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (current.size() == k) {
            out.insert(current);
            return;
        }
        std::size_t needed = k - current.size();
        for (std::size_t i = start; i + needed <= clique.size() + 0; ++i) {
            if (clique.size() - i < needed) break;
            current.push_back(clique[i]);
            self(self, i + 1);
            current.pop_back();
        }
    };
    recurse(recurse, 0);
}

inline std::vector<Group> canonical_groups(std::vector<std::vector<NodeId>> member_sets) {
    for (auto& members : member_sets) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
    std::sort(member_sets.begin(), member_sets.end());
    std::vector<Group> groups;
    groups.reserve(member_sets.size());
    for (std::size_t i = 0; i < member_sets.size(); ++i)
        groups.push_back({std::to_string(i + 1), std::move(member_sets[i])});
    return groups;
}

}  // namespace detail

/// Clique percolation on the symmetrized unweighted graph: k-cliques are
/// sub-enumerated from maximal cliques of size >= k, two k-cliques are
/// adjacent iff they share k-1 nodes, and each connected component's clique
/// union becomes one (possibly overlapping) group.
inline GroupSet detect_groups_cpm(const Snapshot& snapshot, int k) {
    if (k < 3) throw Error("CPM requires k >= 3");
    GroupSet result;
    result.frame_index = snapshot.frame_index;
    result.detector = Detector::cpm;

    detail::SymmetrizedGraph graph(snapshot);
    if (graph.n == 0) return result;

    detail::MaximalCliqueEnumerator enumerator(graph);
    std::set<std::vector<std::uint32_t>> k_cliques;
    for (const auto& clique : enumerator.run()) {
        if (clique.size() < static_cast<std::size_t>(k)) continue;
        std::vector<std::uint32_t> sorted = clique;
        std::sort(sorted.begin(), sorted.end());
        detail::enumerate_k_subsets(sorted, static_cast<std::size_t>(k), k_cliques);
    }
    if (k_cliques.empty()) return result;

    std::vector<std::vector<std::uint32_t>> cliques(k_cliques.begin(), k_cliques.end());
    detail::UnionFind uf(cliques.size());
    // Two k-cliques overlap in k-1 nodes iff they share a (k-1)-subset.
    std::map<std::vector<std::uint32_t>, std::uint32_t> bucket;
    std::vector<std::uint32_t> subset;
    for (std::uint32_t c = 0; c < cliques.size(); ++c) {
        for (std::size_t drop = 0; drop < cliques[c].size(); ++drop) {
            subset.clear();
            for (std::size_t i = 0; i < cliques[c].size(); ++i)
                if (i != drop) subset.push_back(cliques[c][i]);
            auto [it, inserted] = bucket.emplace(subset, c);
            if (!inserted) uf.unite(it->second, c);
        }
    }

    std::map<std::uint32_t, std::vector<NodeId>> components;
    for (std::uint32_t c = 0; c < cliques.size(); ++c) {
        auto& members = components[uf.find(c)];
        for (std::uint32_t local : cliques[c]) members.push_back(snapshot.nodes[local]);
    }
    std::vector<std::vector<NodeId>> member_sets;
    member_sets.reserve(components.size());
    for (auto& [root, members] : components) member_sets.push_back(std::move(members));
    result.groups = detail::canonical_groups(std::move(member_sets));
    return result;
}

/// Asynchronous label propagation over the symmetrized weighted graph.
/// The scan order is a seed-shuffled node list fixed for the whole run and
/// ties go to the smallest label, so the outcome is deterministic per seed.
inline GroupSet detect_groups_labelprop(const Snapshot& snapshot, std::uint64_t seed,
                                        int max_sweeps = 100) {
    GroupSet result;
    result.frame_index = snapshot.frame_index;
    result.detector = Detector::label_prop;
    const std::size_t n = snapshot.node_count();
    if (n == 0) return result;

    // symmetrized weights: w(u,v) = w(u->v) + w(v->u)
    std::vector<std::map<std::uint32_t, double>> weight(n);
    for (std::size_t u = 0; u < n; ++u)
        for (const Arc& arc : snapshot.out[u]) {
            weight[u][arc.target] += arc.weight;
            weight[arc.target][static_cast<std::uint32_t>(u)] += arc.weight;
        }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {  // explicit Fisher-Yates, stdlib-independent
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    std::map<std::uint32_t, double> tally;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (std::uint32_t v : order) {
            if (weight[v].empty()) continue;
            tally.clear();
            for (const auto& [u, w] : weight[v]) tally[label[u]] += w;
            std::uint32_t best = label[v];
            double best_weight = -1.0;
            for (const auto& [lab, w] : tally)
                if (w > best_weight) {  // map order ensures smallest label wins ties
                    best_weight = w;
                    best = lab;
                }
            if (best != label[v]) {
                label[v] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::map<std::uint32_t, std::vector<NodeId>> by_label;
    for (std::size_t v = 0; v < n; ++v) by_label[label[v]].push_back(snapshot.nodes[v]);
    std::vector<std::vector<NodeId>> member_sets;
    member_sets.reserve(by_label.size());
    for (auto& [lab, members] : by_label) member_sets.push_back(std::move(members));
    result.groups = detail::canonical_groups(std::move(member_sets));
    return result;
}

struct GroupLoadResult {
    std::vector<GroupSet> sets;  // one per frame, 1..m
    std::vector<RowIssue> issues;
    std::size_t dropped_groups = 0;
};

/// Load externally computed groups (frame_index,group_id,node_identifier).
/// Rows naming unknown or frame-inactive nodes are rejected with diagnostics;
/// groups left empty after validation are dropped with a warning.
inline GroupLoadResult load_groups(const std::filesystem::path& path, const TemporalNetwork& net,
                                   char delimiter = ',') {
    GroupLoadResult result;
    const std::size_t m = net.frame_count();
    result.sets.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        result.sets[i].frame_index = static_cast<int>(i + 1);
        result.sets[i].detector = Detector::external;
    }

    std::vector<std::map<std::string, std::vector<NodeId>, decltype(&shortlex_less)>> staged(
        m, std::map<std::string, std::vector<NodeId>, decltype(&shortlex_less)>(&shortlex_less));

    DelimitedReader reader(path, delimiter);
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(line_no, fields)) {
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "frame_index") continue;
        }
        if (fields.size() != 3) {
            result.issues.push_back(
                {line_no, "expected 3 fields, got " + std::to_string(fields.size())});
            continue;
        }
        long frame = 0;
        if (!parse_long(fields[0], frame) || frame < 1 || static_cast<std::size_t>(frame) > m) {
            result.issues.push_back({line_no, "frame index out of range '" + fields[0] + "'"});
            continue;
        }
        if (fields[1].empty()) {
            result.issues.push_back({line_no, "empty group id"});
            continue;
        }
        auto& group_slot = staged[static_cast<std::size_t>(frame - 1)][fields[1]];
        auto id = net.nodes.id_of(fields[2]);
        if (!id) {
            result.issues.push_back({line_no, "unknown node identifier '" + fields[2] + "'"});
            continue;
        }
        const Snapshot& snap = net.frames[static_cast<std::size_t>(frame - 1)];
        if (!snap.contains(*id)) {
            result.issues.push_back(
                {line_no, "node '" + fields[2] + "' is not active in frame " + fields[0]});
            continue;
        }
        group_slot.push_back(*id);
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (auto& [gid, members] : staged[i]) {
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
            if (members.empty()) {
                ++result.dropped_groups;
                result.issues.push_back({0, "group '" + gid + "' in frame " +
                                                std::to_string(i + 1) + " empty after validation"});
                continue;
            }
            result.sets[i].groups.push_back({gid, std::move(members)});
        }
    }
    return result;
}

/// Write group sets in the same format load_groups reads, so detection and
/// evolution analysis can run as separate CLI stages.
inline void save_groups(const std::filesystem::path& path, const std::vector<GroupSet>& sets,
                        const NodeTable& nodes, char delimiter = ',') {
    DelimitedWriter w(path, delimiter);
    w.row({"frame_index", "group_id", "node_identifier"});
    for (const GroupSet& set : sets)
        for (const Group& group : set.groups)
            for (NodeId member : group.members)
                w.row({std::to_string(set.frame_index), group.id, nodes.name_of(member)});
    w.flush_and_check();
}

}  // namespace gevo
