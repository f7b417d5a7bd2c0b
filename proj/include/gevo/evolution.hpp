#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gevo/ged.hpp"
#include "gevo/grouping.hpp"

namespace gevo {

/// One pairwise event leaving a chain step.
struct ChainLink {
    EventKind kind = EventKind::continuing;
    std::string target_group;
    int target_chain = 0;
    bool primary = false;  // the edge the chain itself follows
};

struct ChainStep {
    int frame_index = 0;
    std::string group_id;
    std::string in_event;   // "forming" when the group formed into this step, else empty
    std::string out_event;  // event kind leaving this frame, "unmatched", or "end"
    std::vector<ChainLink> links;
};

/// A stitched per-group storyline. Chains fork on splitting (children carry a
/// parent back-reference) and join on merging (the merged chain references
/// every source chain); nobody is designated "the" surviving fragment.
struct EvolutionChain {
    int chain_id = 0;
    std::vector<int> parents;
    std::vector<ChainStep> steps;
};

namespace detail {

inline int chain_kind_rank(EventKind kind) {
    switch (kind) {
        case EventKind::continuing: return 0;
        case EventKind::shrinking: return 1;
        case EventKind::growing: return 2;
        case EventKind::splitting: return 3;
        case EventKind::merging: return 4;
        default: return 5;
    }
}

}  // namespace detail

/// Stitch pairwise events into per-group chains across the whole frame list.
/// Groups without any event in a frame pair surface with "unmatched" status
/// rather than disappearing.
inline std::vector<EvolutionChain> build_chains(const std::vector<EventRecord>& events,
                                                const std::vector<GroupSet>& groupsets) {
    const std::size_t m = groupsets.size();
    std::vector<std::map<std::string, std::size_t, decltype(&shortlex_less)>> index_of(
        m, std::map<std::string, std::size_t, decltype(&shortlex_less)>(&shortlex_less));
    for (std::size_t f = 0; f < m; ++f)
        for (std::size_t g = 0; g < groupsets[f].groups.size(); ++g)
            index_of[f][groupsets[f].groups[g].id] = g;

    auto require_group = [&](int frame, const std::string& id) -> std::size_t {
        if (frame < 1 || static_cast<std::size_t>(frame) > m)
            throw Error("event references unknown frame " + std::to_string(frame));
        const auto& idx = index_of[static_cast<std::size_t>(frame - 1)];
        auto it = idx.find(id);
        if (it == idx.end())
            throw Error("event references unknown group '" + id + "' in frame " +
                        std::to_string(frame));
        return it->second;
    };

    struct OutEdge {
        EventKind kind;
        std::string target;
        std::size_t target_index;
    };
    std::vector<std::vector<std::vector<OutEdge>>> outs(m);
    std::vector<std::vector<bool>> dissolving(m), formed(m);
    for (std::size_t f = 0; f < m; ++f) {
        outs[f].assign(groupsets[f].groups.size(), {});
        dissolving[f].assign(groupsets[f].groups.size(), false);
        formed[f].assign(groupsets[f].groups.size(), false);
    }
    for (const EventRecord& ev : events) {
        if (ev.kind == EventKind::dissolving) {
            dissolving[static_cast<std::size_t>(ev.frame_i - 1)]
                      [require_group(ev.frame_i, ev.source_group)] = true;
        } else if (ev.kind == EventKind::forming) {
            formed[static_cast<std::size_t>(ev.frame_j - 1)]
                  [require_group(ev.frame_j, ev.target_group)] = true;
        } else {
            std::size_t src = require_group(ev.frame_i, ev.source_group);
            std::size_t dst = require_group(ev.frame_j, ev.target_group);
            outs[static_cast<std::size_t>(ev.frame_i - 1)][src].push_back(
                {ev.kind, ev.target_group, dst});
        }
    }
    for (auto& frame_outs : outs)
        for (auto& edges : frame_outs)
            std::sort(edges.begin(), edges.end(), [](const OutEdge& a, const OutEdge& b) {
                int ra = detail::chain_kind_rank(a.kind), rb = detail::chain_kind_rank(b.kind);
                if (ra != rb) return ra < rb;
                return shortlex_less(a.target, b.target);
            });

    std::vector<EvolutionChain> chains;
    std::vector<std::vector<int>> chain_of(m);
    for (std::size_t f = 0; f < m; ++f) chain_of[f].assign(groupsets[f].groups.size(), -1);

    auto new_chain = [&](std::size_t f, std::size_t g, std::vector<int> parents) -> int {
        EvolutionChain chain;
        chain.chain_id = static_cast<int>(chains.size()) + 1;
        chain.parents = std::move(parents);
        chains.push_back(std::move(chain));
        chain_of[f][g] = chains.back().chain_id;
        return chains.back().chain_id;
    };
    auto chain_at = [&](int id) -> EvolutionChain& {
        return chains[static_cast<std::size_t>(id - 1)];
    };

    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < groupsets[f].groups.size(); ++g)
            if (chain_of[f][g] < 0) new_chain(f, g, {});

        for (std::size_t g = 0; g < groupsets[f].groups.size(); ++g) {
            const int c = chain_of[f][g];
            ChainStep step;
            step.frame_index = groupsets[f].frame_index;
            step.group_id = groupsets[f].groups[g].id;
            if (formed[f][g]) step.in_event = "forming";

            if (dissolving[f][g]) {
                step.out_event = "dissolving";
            } else if (f + 1 == m) {
                step.out_event = "end";
            } else if (outs[f][g].empty()) {
                step.out_event = "unmatched";
            } else {
                bool followed = false;
                for (const OutEdge& edge : outs[f][g]) {
                    ChainLink link;
                    link.kind = edge.kind;
                    link.target_group = edge.target;
                    const bool continuation = detail::chain_kind_rank(edge.kind) <= 2;
                    int& target_chain = chain_of[f + 1][edge.target_index];
                    if (continuation && !followed && target_chain < 0) {
                        target_chain = c;  // the chain itself moves forward
                        link.primary = true;
                        followed = true;
                        step.out_event = event_kind_name(edge.kind);
                    } else if (target_chain < 0) {
                        target_chain = new_chain(f + 1, edge.target_index, {c});
                    } else if (target_chain != c) {
                        auto& parents = chain_at(target_chain).parents;
                        if (std::find(parents.begin(), parents.end(), c) == parents.end())
                            parents.push_back(c);
                    }
                    link.target_chain = chain_of[f + 1][edge.target_index];
                    step.links.push_back(link);
                }
                if (!followed) step.out_event = event_kind_name(outs[f][g].front().kind);
            }
            chain_at(c).steps.push_back(std::move(step));
        }
    }
    return chains;
}

// --- summary ---------------------------------------------------------------

constexpr std::size_t kEventKindCount = 7;

/// Counts follow the reporting column order: form, dissolve, shrink, growth,
/// continue, split, merge.
inline std::size_t summary_column(EventKind kind) {
    switch (kind) {
        case EventKind::forming: return 0;
        case EventKind::dissolving: return 1;
        case EventKind::shrinking: return 2;
        case EventKind::growing: return 3;
        case EventKind::continuing: return 4;
        case EventKind::splitting: return 5;
        case EventKind::merging: return 6;
    }
    return 0;
}

inline const std::array<const char*, kEventKindCount>& summary_column_names() {
    static const std::array<const char*, kEventKindCount> names = {
        "form", "dissolve", "shrink", "growth", "continue", "split", "merge"};
    return names;
}

struct EventSummary {
    std::map<std::pair<int, int>, std::array<std::size_t, kEventKindCount>> per_pair;
    std::array<std::size_t, kEventKindCount> totals{};
    std::size_t total = 0;

    std::size_t count(EventKind kind) const { return totals[summary_column(kind)]; }
};

inline EventSummary summarize(const std::vector<EventRecord>& events) {
    EventSummary summary;
    for (const EventRecord& ev : events) {
        auto& row = summary.per_pair[{ev.frame_i, ev.frame_j}];
        ++row[summary_column(ev.kind)];
        ++summary.totals[summary_column(ev.kind)];
        ++summary.total;
    }
    return summary;
}

inline void write_summary_csv(const std::filesystem::path& path, const EventSummary& summary,
                              char delimiter = ',') {
    DelimitedWriter w(path, delimiter);
    std::vector<std::string> header = {"frame_i", "frame_j"};
    for (const char* name : summary_column_names()) header.push_back(name);
    header.push_back("total");
    w.row(header);
    auto counts_row = [](const std::array<std::size_t, kEventKindCount>& counts) {
        std::vector<std::string> fields;
        std::size_t row_total = 0;
        for (std::size_t c : counts) {
            fields.push_back(std::to_string(c));
            row_total += c;
        }
        fields.push_back(std::to_string(row_total));
        return fields;
    };
    for (const auto& [pair, counts] : summary.per_pair) {
        std::vector<std::string> fields = {std::to_string(pair.first), std::to_string(pair.second)};
        for (const std::string& f : counts_row(counts)) fields.push_back(f);
        w.row(fields);
    }
    std::vector<std::string> fields = {"total", ""};
    for (const std::string& f : counts_row(summary.totals)) fields.push_back(f);
    w.row(fields);
    w.flush_and_check();
}

/// Line-oriented chain export: one chain per line, steps as
/// frame:group:event triples.
inline void write_chains_text(const std::filesystem::path& path,
                              const std::vector<EvolutionChain>& chains) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path.string());
    for (const EvolutionChain& chain : chains) {
        out << "chain " << chain.chain_id;
        if (!chain.parents.empty()) {
            out << " parents=";
            for (std::size_t i = 0; i < chain.parents.size(); ++i)
                out << (i ? "|" : "") << chain.parents[i];
        }
        if (!chain.steps.empty() && chain.steps.front().in_event == "forming") out << " [formed]";
        out << ":";
        for (const ChainStep& step : chain.steps)
            out << " " << step.frame_index << ":" << step.group_id << ":" << step.out_event;
        out << "\n";
    }
    out.flush();
    if (!out) throw Error("write failed");
}

/// Nested machine-readable export of the same chains.
inline void write_chains_json(const std::filesystem::path& path,
                              const std::vector<EvolutionChain>& chains) {
    nlohmann::json root;
    root["chains"] = nlohmann::json::array();
    for (const EvolutionChain& chain : chains) {
        nlohmann::json jc;
        jc["id"] = chain.chain_id;
        jc["parents"] = chain.parents;
        jc["steps"] = nlohmann::json::array();
        for (const ChainStep& step : chain.steps) {
            nlohmann::json js;
            js["frame"] = step.frame_index;
            js["group"] = step.group_id;
            if (!step.in_event.empty()) js["entered_by"] = step.in_event;
            js["event"] = step.out_event;
            if (!step.links.empty()) {
                js["links"] = nlohmann::json::array();
                for (const ChainLink& link : step.links) {
                    nlohmann::json jl;
                    jl["kind"] = event_kind_name(link.kind);
                    jl["target_group"] = link.target_group;
                    jl["target_chain"] = link.target_chain;
                    jl["primary"] = link.primary;
                    js["links"].push_back(jl);
                }
            }
            jc["steps"].push_back(js);
        }
        root["chains"].push_back(jc);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path.string());
    out << root.dump(2) << "\n";
    out.flush();
    if (!out) throw Error("write failed");
}

inline nlohmann::json read_chains_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path.string());
    nlohmann::json root;
    in >> root;
    return root;
}

}  // namespace gevo
