#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gevo/grouping.hpp"
#include "gevo/social_position.hpp"
#include "gevo/temporal_network.hpp"

namespace gevo {

/// Event-classification thresholds, all as fractions in [0,1]. alpha gates
/// the forward inclusion, beta the backward one; lifecycle (default 10%)
/// gates forming/dissolving. Match counting reuses alpha/beta unless the
/// optional overrides are set.
struct Thresholds {
    double alpha = 0.5;
    double beta = 0.5;
    double lifecycle = 0.1;
    std::optional<double> match_alpha;
    std::optional<double> match_beta;

    double effective_match_alpha() const { return match_alpha.value_or(alpha); }
    double effective_match_beta() const { return match_beta.value_or(beta); }

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(alpha) || !in_unit(beta)) throw Error("alpha and beta must lie in [0,1]");
        if (!in_unit(lifecycle)) throw Error("lifecycle threshold must lie in [0,1]");
        if (!in_unit(effective_match_alpha()) || !in_unit(effective_match_beta()))
            throw Error("match thresholds must lie in [0,1]");
        if (lifecycle >= std::min(alpha, beta))
            throw Error("lifecycle threshold must be below min(alpha, beta)");
    }
};

enum class EventKind { continuing, shrinking, growing, splitting, merging, dissolving, forming };

inline const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::continuing: return "continuing";
        case EventKind::shrinking: return "shrinking";
        case EventKind::growing: return "growing";
        case EventKind::splitting: return "splitting";
        case EventKind::merging: return "merging";
        case EventKind::dissolving: return "dissolving";
        case EventKind::forming: return "forming";
    }
    return "?";
}

inline std::optional<EventKind> event_kind_from_name(const std::string& name) {
    for (EventKind k : {EventKind::continuing, EventKind::shrinking, EventKind::growing,
                        EventKind::splitting, EventKind::merging, EventKind::dissolving,
                        EventKind::forming})
        if (name == event_kind_name(k)) return k;
    return std::nullopt;
}

/// Inclusion of group g1 in group g2: the share of g1's members present in
/// g2, weighted a second time by the share of g1's within-group social
/// position mass those members carry. sp1 must be g1's within-group SP.
inline double inclusion(const Group& g1, const Group& g2, const SpVector& sp1) {
    if (g1.members.empty()) throw Error("inclusion: first group is empty");
    double sp_total = 0.0;
    double sp_shared = 0.0;
    std::size_t shared = 0;
    for (NodeId member : g1.members) {
        const double v = sp1.value_of(member);  // throws if sp1 does not cover g1
        sp_total += v;
        if (g2.contains(member)) {
            sp_shared += v;
            ++shared;
        }
    }
    if (shared == 0) return 0.0;
    const double quantity = static_cast<double>(shared) / static_cast<double>(g1.size());
    const double quality = sp_shared / sp_total;  // SP >= 1-eps keeps this well-defined
    return quantity * quality;
}

struct Inclusion {
    double forward = 0.0;   // I(earlier, later)
    double backward = 0.0;  // I(later, earlier)
};

/// Both inclusion directions for every group pair of one consecutive frame
/// pair; rows index the earlier frame's groups, columns the later frame's.
struct InclusionMatrix {
    int frame_i = 0;  // the pair covers frames (frame_i, frame_i + 1)
    std::size_t earlier_count = 0;
    std::size_t later_count = 0;
    std::vector<Inclusion> cells;  // row-major [earlier][later]

    const Inclusion& at(std::size_t earlier, std::size_t later) const {
        return cells[earlier * later_count + later];
    }
    Inclusion& at(std::size_t earlier, std::size_t later) {
        return cells[earlier * later_count + later];
    }
};

/// A pair (earlier, later) matches iff at least one of its directed
/// inclusions passes its threshold.
inline bool pair_matches(const Inclusion& inc, const Thresholds& thresholds) {
    return inc.forward >= thresholds.effective_match_alpha() ||
           inc.backward >= thresholds.effective_match_beta();
}

enum class MatchSide { earlier, later };

/// Number of opposite-frame groups matching the group at `index`.
inline int count_matches(const InclusionMatrix& matrix, MatchSide side, std::size_t index,
                         const Thresholds& thresholds) {
    int count = 0;
    if (side == MatchSide::earlier) {
        for (std::size_t j = 0; j < matrix.later_count; ++j)
            if (pair_matches(matrix.at(index, j), thresholds)) ++count;
    } else {
        for (std::size_t i = 0; i < matrix.earlier_count; ++i)
            if (pair_matches(matrix.at(i, index), thresholds)) ++count;
    }
    return count;
}

/// The pairwise event decision. matches_fwd counts matches of the earlier
/// group against the later frame, matches_bwd counts matches of the later
/// group against the earlier frame. The five cases are mutually exclusive,
/// so any pair yields at most one kind.
inline std::optional<EventKind> classify_pair(std::size_t size1, std::size_t size2, double i_fwd,
                                              double i_bwd, int matches_fwd, int matches_bwd,
                                              const Thresholds& thresholds) {
    const bool fwd = i_fwd >= thresholds.alpha;
    const bool bwd = i_bwd >= thresholds.beta;
    if (fwd && bwd) {
        if (size1 == size2) return EventKind::continuing;
        return size1 > size2 ? EventKind::shrinking : EventKind::growing;
    }
    if (!fwd && bwd && size1 >= size2) {
        if (matches_bwd == 1) return EventKind::shrinking;
        if (matches_bwd > 1) return EventKind::splitting;
        return std::nullopt;
    }
    if (fwd && !bwd && size1 <= size2) {
        if (matches_fwd == 1) return EventKind::growing;
        if (matches_fwd > 1) return EventKind::merging;
        return std::nullopt;
    }
    return std::nullopt;
}

/// One classified transition. Lifecycle events carry only one side: a
/// dissolving record has no target group, a forming record no source.
struct EventRecord {
    int frame_i = 0;
    int frame_j = 0;
    EventKind kind = EventKind::continuing;
    std::string source_group;  // empty for forming
    std::string target_group;  // empty for dissolving
    std::optional<Inclusion> inclusions;
};

inline bool event_order_less(const EventRecord& a, const EventRecord& b) {
    if (a.frame_i != b.frame_i) return a.frame_i < b.frame_i;
    if (a.source_group != b.source_group) return shortlex_less(a.source_group, b.source_group);
    if (a.target_group != b.target_group) return shortlex_less(a.target_group, b.target_group);
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
}

/// Forming/dissolving for one frame pair: a group dissolves (forms) iff both
/// inclusions stay below the lifecycle threshold against every group of the
/// other frame; with no counter-groups at all the condition holds vacuously.
inline std::vector<EventRecord> detect_lifecycle(const InclusionMatrix& matrix,
                                                 const GroupSet& earlier, const GroupSet& later,
                                                 const Thresholds& thresholds) {
    std::vector<EventRecord> events;
    for (std::size_t i = 0; i < earlier.groups.size(); ++i) {
        bool dissolving = true;
        for (std::size_t j = 0; j < later.groups.size() && dissolving; ++j) {
            const Inclusion& inc = matrix.at(i, j);
            if (inc.forward >= thresholds.lifecycle || inc.backward >= thresholds.lifecycle)
                dissolving = false;
        }
        if (dissolving)
            events.push_back({matrix.frame_i, matrix.frame_i + 1, EventKind::dissolving,
                              earlier.groups[i].id, "", std::nullopt});
    }
    for (std::size_t j = 0; j < later.groups.size(); ++j) {
        bool forming = true;
        for (std::size_t i = 0; i < earlier.groups.size() && forming; ++i) {
            const Inclusion& inc = matrix.at(i, j);
            if (inc.forward >= thresholds.lifecycle || inc.backward >= thresholds.lifecycle)
                forming = false;
        }
        if (forming)
            events.push_back({matrix.frame_i, matrix.frame_i + 1, EventKind::forming, "",
                              later.groups[j].id, std::nullopt});
    }
    return events;
}

struct CacheStats {
    std::size_t sp_runs = 0;
    std::size_t inclusion_evaluations = 0;
};

/// Inclusion matrices for every consecutive frame pair. Built once, then
/// reusable across arbitrarily many threshold settings: classification never
/// recomputes SP or inclusion values.
struct InclusionCache {
    const TemporalNetwork* network = nullptr;
    const std::vector<GroupSet>* groupsets = nullptr;
    std::vector<InclusionMatrix> pairs;  // one per frame pair (i, i+1)
    CacheStats stats;
};

inline void validate_groupsets(const TemporalNetwork& network,
                               const std::vector<GroupSet>& groupsets) {
    if (groupsets.size() != network.frame_count())
        throw Error("group sets do not match the frame count");
    for (std::size_t i = 0; i < groupsets.size(); ++i) {
        if (groupsets[i].frame_index != static_cast<int>(i + 1))
            throw Error("group set frame indices are not contiguous");
        for (const Group& g : groupsets[i].groups) {
            if (g.members.empty()) throw Error("empty group in frame " + std::to_string(i + 1));
            for (NodeId member : g.members)
                if (!network.frames[i].contains(member))
                    throw Error("group member not active in frame " + std::to_string(i + 1));
        }
    }
}

inline InclusionCache build_inclusion_cache(const TemporalNetwork& network,
                                            const std::vector<GroupSet>& groupsets,
                                            const SpConfig& sp_config = {},
                                            GroupCommitments mode = GroupCommitments::renormalized) {
    validate_groupsets(network, groupsets);
    InclusionCache cache;
    cache.network = &network;
    cache.groupsets = &groupsets;
    if (groupsets.empty()) return cache;

    std::vector<std::vector<SpVector>> group_sp(groupsets.size());
    for (std::size_t f = 0; f < groupsets.size(); ++f) {
        group_sp[f].reserve(groupsets[f].groups.size());
        for (const Group& g : groupsets[f].groups) {
            group_sp[f].push_back(compute_group_sp(network.frames[f], g.members, sp_config, mode));
            ++cache.stats.sp_runs;
        }
    }

    cache.pairs.reserve(groupsets.size() - 1);
    for (std::size_t f = 0; f + 1 < groupsets.size(); ++f) {
        const GroupSet& earlier = groupsets[f];
        const GroupSet& later = groupsets[f + 1];
        InclusionMatrix matrix;
        matrix.frame_i = earlier.frame_index;
        matrix.earlier_count = earlier.groups.size();
        matrix.later_count = later.groups.size();
        matrix.cells.assign(matrix.earlier_count * matrix.later_count, {});
        for (std::size_t i = 0; i < matrix.earlier_count; ++i)
            for (std::size_t j = 0; j < matrix.later_count; ++j) {
                matrix.at(i, j).forward =
                    inclusion(earlier.groups[i], later.groups[j], group_sp[f][i]);
                matrix.at(i, j).backward =
                    inclusion(later.groups[j], earlier.groups[i], group_sp[f + 1][j]);
                cache.stats.inclusion_evaluations += 2;
            }
        cache.pairs.push_back(std::move(matrix));
    }
    return cache;
}

/// Classify every frame pair of a prebuilt cache. Lifecycle events are
/// decided first; groups flagged forming or dissolving are excluded from the
/// pairwise pass for that frame pair.
inline std::vector<EventRecord> classify_events(const InclusionCache& cache,
                                                const Thresholds& thresholds) {
    thresholds.validate();
    std::vector<EventRecord> events;
    const auto& groupsets = *cache.groupsets;
    for (const InclusionMatrix& matrix : cache.pairs) {
        const GroupSet& earlier = groupsets[static_cast<std::size_t>(matrix.frame_i - 1)];
        const GroupSet& later = groupsets[static_cast<std::size_t>(matrix.frame_i)];

        std::vector<EventRecord> lifecycle = detect_lifecycle(matrix, earlier, later, thresholds);
        std::vector<bool> dissolving(earlier.groups.size(), false);
        std::vector<bool> forming(later.groups.size(), false);
        for (const EventRecord& ev : lifecycle) {
            if (ev.kind == EventKind::dissolving) {
                for (std::size_t i = 0; i < earlier.groups.size(); ++i)
                    if (earlier.groups[i].id == ev.source_group) dissolving[i] = true;
            } else {
                for (std::size_t j = 0; j < later.groups.size(); ++j)
                    if (later.groups[j].id == ev.target_group) forming[j] = true;
            }
        }

        std::vector<int> matches_fwd(earlier.groups.size(), 0);
        std::vector<int> matches_bwd(later.groups.size(), 0);
        for (std::size_t i = 0; i < earlier.groups.size(); ++i)
            matches_fwd[i] = count_matches(matrix, MatchSide::earlier, i, thresholds);
        for (std::size_t j = 0; j < later.groups.size(); ++j)
            matches_bwd[j] = count_matches(matrix, MatchSide::later, j, thresholds);

        for (std::size_t i = 0; i < earlier.groups.size(); ++i) {
            if (dissolving[i]) continue;
            for (std::size_t j = 0; j < later.groups.size(); ++j) {
                if (forming[j]) continue;
                const Inclusion& inc = matrix.at(i, j);
                auto kind = classify_pair(earlier.groups[i].size(), later.groups[j].size(),
                                          inc.forward, inc.backward, matches_fwd[i],
                                          matches_bwd[j], thresholds);
                if (kind)
                    events.push_back({matrix.frame_i, matrix.frame_i + 1, *kind,
                                      earlier.groups[i].id, later.groups[j].id, inc});
            }
        }
        events.insert(events.end(), lifecycle.begin(), lifecycle.end());
    }
    std::sort(events.begin(), events.end(), event_order_less);
    return events;
}

/// Full GED pass: per-group SP, inclusion matrices, match counts, pairwise
/// classification and lifecycle events over every consecutive frame pair.
inline std::vector<EventRecord> detect_events(const TemporalNetwork& network,
                                              const std::vector<GroupSet>& groupsets,
                                              const Thresholds& thresholds,
                                              const SpConfig& sp_config = {},
                                              GroupCommitments mode = GroupCommitments::renormalized) {
    InclusionCache cache = build_inclusion_cache(network, groupsets, sp_config, mode);
    return classify_events(cache, thresholds);
}

inline void write_events_csv(const std::filesystem::path& path,
                             const std::vector<EventRecord>& events, char delimiter = ',',
                             const std::string& kind_prefix = "") {
    DelimitedWriter w(path, delimiter);
    w.row({"frame_i", "frame_j", "event_kind", "source_group", "target_group", "inclusion_fwd",
           "inclusion_bwd"});
    for (const EventRecord& ev : events) {
        std::string fwd, bwd;
        if (ev.inclusions) {
            fwd = format_double(ev.inclusions->forward);
            bwd = format_double(ev.inclusions->backward);
        }
        w.row({std::to_string(ev.frame_i), std::to_string(ev.frame_j),
               kind_prefix + event_kind_name(ev.kind), ev.source_group, ev.target_group, fwd, bwd});
    }
    w.flush_and_check();
}

inline std::vector<EventRecord> read_events_csv(const std::filesystem::path& path,
                                                char delimiter = ',') {
    DelimitedReader reader(path, delimiter);
    std::vector<EventRecord> events;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(line_no, fields)) {
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "frame_i") continue;
        }
        if (fields.size() != 7)
            throw Error("events file: bad row at line " + std::to_string(line_no));
        EventRecord ev;
        long fi = 0, fj = 0;
        if (!parse_long(fields[0], fi) || !parse_long(fields[1], fj))
            throw Error("events file: bad frame indices at line " + std::to_string(line_no));
        ev.frame_i = static_cast<int>(fi);
        ev.frame_j = static_cast<int>(fj);
        auto kind = event_kind_from_name(fields[2]);
        if (!kind) throw Error("events file: unknown event kind '" + fields[2] + "'");
        ev.kind = *kind;
        ev.source_group = fields[3];
        ev.target_group = fields[4];
        if (!fields[5].empty() || !fields[6].empty()) {
            Inclusion inc;
            if (!parse_double(fields[5], inc.forward) || !parse_double(fields[6], inc.backward))
                throw Error("events file: bad inclusion at line " + std::to_string(line_no));
            ev.inclusions = inc;
        }
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace gevo
