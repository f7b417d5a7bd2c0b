#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gevo/ged.hpp"
#include "gevo/grouping.hpp"
#include "gevo/temporal_network.hpp"

namespace gevo {

struct AsurConfig {
    double kappa = 0.5;  // overlap threshold for merge/split

    void validate() const {
        if (!(kappa > 0.0 && kappa <= 1.0)) throw Error("kappa must lie in (0,1]");
    }
};

enum class AsurKind { continue_, k_merge, k_split, form, dissolve };

inline const char* asur_kind_name(AsurKind kind) {
    switch (kind) {
        case AsurKind::continue_: return "continue";
        case AsurKind::k_merge: return "k_merge";
        case AsurKind::k_split: return "k_split";
        case AsurKind::form: return "form";
        case AsurKind::dissolve: return "dissolve";
    }
    return "?";
}

/// One rule firing. Merge carries two sources and one target, split one
/// source and two targets; form has no source, dissolve no target.
struct AsurEvent {
    int frame_i = 0;
    int frame_j = 0;
    AsurKind kind = AsurKind::continue_;
    std::vector<std::string> sources;
    std::vector<std::string> targets;
};

namespace detail {

inline bool any_member_active(const Group& group, const Snapshot& frame) {
    for (NodeId member : group.members)
        if (frame.contains(member)) return true;
    return false;
}

inline std::size_t union_overlap(const Group& a, const Group& b, const Group& target) {
    // |(a ∪ b) ∩ target| without materializing the union
    const std::size_t ia = intersection_size(a.members, target.members);
    const std::size_t ib = intersection_size(b.members, target.members);
    std::size_t triple = 0;
    std::size_t i = 0, j = 0;
    std::vector<NodeId> ab;
    ab.reserve(std::min(a.members.size(), b.members.size()));
    while (i < a.members.size() && j < b.members.size()) {
        if (a.members[i] < b.members[j]) ++i;
        else if (b.members[j] < a.members[i]) ++j;
        else { ab.push_back(a.members[i]); ++i; ++j; }
    }
    triple = intersection_size(ab, target.members);
    return ia + ib - triple;
}

inline bool asur_event_less(const AsurEvent& a, const AsurEvent& b) {
    if (a.frame_i != b.frame_i) return a.frame_i < b.frame_i;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.sources != b.sources)
        return std::lexicographical_compare(a.sources.begin(), a.sources.end(), b.sources.begin(),
                                            b.sources.end(), shortlex_less);
    return std::lexicographical_compare(a.targets.begin(), a.targets.end(), b.targets.begin(),
                                        b.targets.end(), shortlex_less);
}

}  // namespace detail

/// The event framework of the comparison baseline: continue on identical
/// membership, dissolve/form on total absence from the neighboring frame's
/// node set, merge/split when two groups' union overlaps a single group of
/// the other frame by more than kappa of the larger constituent. Every
/// qualifying rule fires, even several for the same pair of groups.
inline std::vector<AsurEvent> asur_detect(const std::vector<GroupSet>& groupsets,
                                          const TemporalNetwork& network,
                                          const AsurConfig& config = {}) {
    config.validate();
    validate_groupsets(network, groupsets);
    std::vector<AsurEvent> events;

    for (std::size_t f = 0; f + 1 < groupsets.size(); ++f) {
        const GroupSet& earlier = groupsets[f];
        const GroupSet& later = groupsets[f + 1];
        const int fi = earlier.frame_index;
        const int fj = later.frame_index;

        for (const Group& g : earlier.groups) {
            for (const Group& h : later.groups)
                if (g.members == h.members)
                    events.push_back({fi, fj, AsurKind::continue_, {g.id}, {h.id}});
            if (!detail::any_member_active(g, network.frames[f + 1]))
                events.push_back({fi, fj, AsurKind::dissolve, {g.id}, {}});
        }
        for (const Group& h : later.groups)
            if (!detail::any_member_active(h, network.frames[f]))
                events.push_back({fi, fj, AsurKind::form, {}, {h.id}});

        // merge: two earlier groups jointly covering one later group
        for (std::size_t a = 0; a < earlier.groups.size(); ++a)
            for (std::size_t b = a + 1; b < earlier.groups.size(); ++b) {
                const Group& g1 = earlier.groups[a];
                const Group& g2 = earlier.groups[b];
                const double base = static_cast<double>(std::max(g1.size(), g2.size()));
                for (const Group& h : later.groups) {
                    if (intersection_size(g1.members, h.members) == 0) continue;
                    if (intersection_size(g2.members, h.members) == 0) continue;
                    if (static_cast<double>(detail::union_overlap(g1, g2, h)) >
                        config.kappa * base)
                        events.push_back({fi, fj, AsurKind::k_merge, {g1.id, g2.id}, {h.id}});
                }
            }
        // split: one earlier group covered by two later groups
        for (const Group& g : earlier.groups)
            for (std::size_t a = 0; a < later.groups.size(); ++a)
                for (std::size_t b = a + 1; b < later.groups.size(); ++b) {
                    const Group& h1 = later.groups[a];
                    const Group& h2 = later.groups[b];
                    if (intersection_size(h1.members, g.members) == 0) continue;
                    if (intersection_size(h2.members, g.members) == 0) continue;
                    const double base = static_cast<double>(std::max(h1.size(), h2.size()));
                    if (static_cast<double>(detail::union_overlap(h1, h2, g)) > config.kappa * base)
                        events.push_back({fi, fj, AsurKind::k_split, {g.id}, {h1.id, h2.id}});
                }
    }
    std::sort(events.begin(), events.end(), detail::asur_event_less);
    return events;
}

struct AsurAnomaly {
    int frame_i = 0;
    int frame_j = 0;
    std::string source;
    std::string target;
    std::vector<AsurKind> kinds;  // >= 2 distinct kinds on the same pair
};

struct AsurAudit {
    std::size_t total_events = 0;
    std::size_t distinct_events = 0;  // total minus per-pair kind redundancies
    std::vector<AsurAnomaly> anomalies;
};

/// Flag every cross-frame group pair assigned two or more event kinds, the
/// weakness the baseline is known for. Each anomalous pair contributes its
/// redundant kind count to total - distinct.
inline AsurAudit asur_anomaly_audit(const std::vector<AsurEvent>& events) {
    AsurAudit audit;
    audit.total_events = events.size();

    std::map<std::tuple<int, std::string, std::string>, std::set<AsurKind>> pair_kinds;
    for (const AsurEvent& ev : events)
        for (const std::string& source : ev.sources)
            for (const std::string& target : ev.targets)
                pair_kinds[{ev.frame_i, source, target}].insert(ev.kind);

    std::size_t redundancy = 0;
    for (const auto& [key, kinds] : pair_kinds) {
        if (kinds.size() < 2) continue;
        redundancy += kinds.size() - 1;
        AsurAnomaly anomaly;
        anomaly.frame_i = std::get<0>(key);
        anomaly.frame_j = anomaly.frame_i + 1;
        anomaly.source = std::get<1>(key);
        anomaly.target = std::get<2>(key);
        anomaly.kinds.assign(kinds.begin(), kinds.end());
        audit.anomalies.push_back(std::move(anomaly));
    }
    audit.distinct_events = audit.total_events - redundancy;
    return audit;
}

/// Event CSV in the same schema as the GED output, kinds namespaced
/// "asur:...". Merge and split rows are flattened to one row per
/// (source, target) incidence so the two methods diff at pair granularity.
inline void write_asur_events_csv(const std::filesystem::path& path,
                                  const std::vector<AsurEvent>& events, char delimiter = ',') {
    DelimitedWriter w(path, delimiter);
    w.row({"frame_i", "frame_j", "event_kind", "source_group", "target_group", "inclusion_fwd",
           "inclusion_bwd"});
    auto emit = [&](const AsurEvent& ev, const std::string& source, const std::string& target) {
        w.row({std::to_string(ev.frame_i), std::to_string(ev.frame_j),
               std::string("asur:") + asur_kind_name(ev.kind), source, target, "", ""});
    };
    for (const AsurEvent& ev : events) {
        if (ev.sources.empty()) {
            for (const auto& t : ev.targets) emit(ev, "", t);
        } else if (ev.targets.empty()) {
            for (const auto& s : ev.sources) emit(ev, s, "");
        } else {
            for (const auto& s : ev.sources)
                for (const auto& t : ev.targets) emit(ev, s, t);
        }
    }
    w.flush_and_check();
}

}  // namespace gevo
