#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gevo/temporal_network.hpp"

namespace gevo {

struct SpConfig {
    double epsilon = 0.85;
    double tolerance = 1e-8;
    int max_iterations = 200;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0,1)");
        if (!(tolerance > 0.0)) throw Error("tolerance must be positive");
        if (max_iterations < 1) throw Error("max_iterations must be positive");
    }
};

/// How commitments are derived for a group's induced subgraph: re-normalized
/// within the group (each member's in-group weights sum to 1) or carried over
/// from the whole snapshot (sums may fall below 1).
enum class GroupCommitments { renormalized, global_scaled };

/// Converged social position values, keyed by sorted global node ids.
struct SpVector {
    std::vector<NodeId> members;
    std::vector<double> values;
    int iterations_used = 0;
    bool converged = false;

    double value_of(NodeId id) const {
        auto it = std::lower_bound(members.begin(), members.end(), id);
        if (it == members.end() || *it != id) throw Error("node missing from SP vector");
        return values[static_cast<std::size_t>(it - members.begin())];
    }

    double total() const {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum;
    }
};

namespace detail {

/// Fixed-point iteration of SP(x) = (1-e) + e * sum_y SP(y) * C(y->x) over a
/// dense local adjacency. Jacobi updates keep the result independent of node
/// order.
inline SpVector iterate_sp(std::vector<NodeId> members,
                           const std::vector<std::vector<Arc>>& out, const SpConfig& config) {
    config.validate();
    const std::size_t n = members.size();
    SpVector sp;
    sp.members = std::move(members);
    sp.values.assign(n, 1.0);  // SP_0 = 1 for every node
    if (n == 0) {
        sp.converged = true;
        return sp;
    }
    std::vector<double> next(n, 0.0);
    const double base = 1.0 - config.epsilon;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        std::fill(next.begin(), next.end(), base);
        for (std::size_t y = 0; y < n; ++y) {
            const double spy = sp.values[y];
            for (const Arc& arc : out[y]) next[arc.target] += config.epsilon * spy * arc.commitment;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::fabs(next[i] - sp.values[i]));
        sp.values.swap(next);
        sp.iterations_used = iter;
        if (delta < config.tolerance) {
            sp.converged = true;
            break;
        }
    }
    return sp;
}

inline void check_normalized(const Snapshot& snapshot) {
    for (std::size_t y = 0; y < snapshot.out.size(); ++y) {
        if (snapshot.out[y].empty()) continue;
        double total = 0.0;
        for (const Arc& arc : snapshot.out[y]) {
            if (arc.commitment < 0.0) throw Error("negative commitment in snapshot");
            total += arc.commitment;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw Error("snapshot commitments are not normalized");
    }
}

}  // namespace detail

/// Social position over a whole snapshot.
inline SpVector compute_sp(const Snapshot& snapshot, const SpConfig& config = {}) {
    detail::check_normalized(snapshot);
    return detail::iterate_sp(snapshot.nodes, snapshot.out, config);
}

/// Social position restricted to a group's induced subgraph. Members with no
/// within-group outgoing edges become dangling and sit at the 1-epsilon floor
/// unless others commit to them.
inline SpVector compute_group_sp(const Snapshot& snapshot, const std::vector<NodeId>& group,
                                 const SpConfig& config = {},
                                 GroupCommitments mode = GroupCommitments::renormalized) {
    if (group.empty()) throw Error("group is empty");
    detail::check_normalized(snapshot);

    std::vector<NodeId> members = group;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());

    const std::size_t n = members.size();
    std::vector<std::uint32_t> local_of_snapshot;  // member -> snapshot local index
    local_of_snapshot.reserve(n);
    for (NodeId id : members) {
        auto local = snapshot.local_index(id);
        if (!local) throw Error("group member not present in snapshot");
        local_of_snapshot.push_back(*local);
    }

    auto member_index = [&](NodeId id) -> std::optional<std::uint32_t> {
        auto it = std::lower_bound(members.begin(), members.end(), id);
        if (it == members.end() || *it != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - members.begin());
    };

    std::vector<std::vector<Arc>> induced(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const Arc& arc : snapshot.out[local_of_snapshot[i]]) {
            auto target = member_index(snapshot.nodes[arc.target]);
            if (target) induced[i].push_back({*target, arc.weight, arc.commitment});
        }
        if (mode == GroupCommitments::renormalized) {
            double total = 0.0;
            for (const Arc& a : induced[i]) total += a.weight;
            if (total > 0.0)
                for (Arc& a : induced[i]) a.commitment = a.weight / total;
            else
                induced[i].clear();
        }
    }
    return detail::iterate_sp(std::move(members), induced, config);
}

}  // namespace gevo
