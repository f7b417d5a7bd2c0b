#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gevo/csv.hpp"

namespace gevo {

using NodeId = std::uint32_t;

/// One timestamped directed interaction, identifiers still in string form.
struct InteractionRecord {
    std::string source;
    std::string target;
    double timestamp = 0.0;
    double weight = 1.0;
};

struct IngestOptions {
    char delimiter = ',';
};

struct IngestResult {
    std::vector<InteractionRecord> records;  // sorted by timestamp, stable
    std::size_t self_loops_dropped = 0;
    std::vector<RowIssue> issues;  // malformed rows, with line numbers
};

namespace detail {

inline bool looks_like_edge_header(const std::vector<std::string>& fields) {
    return !fields.empty() && (fields[0] == "source" || fields[0] == "Source");
}

}  // namespace detail

/// Read a delimited edge list (source,target,timestamp[,weight]). Self-loops
/// are dropped and counted; rows that do not parse are reported with their
/// line number and skipped. A leading "source,..." header row is tolerated.
inline IngestResult ingest_edges(const std::filesystem::path& path,
                                 const IngestOptions& options = {}) {
    IngestResult result;
    DelimitedReader reader(path, options.delimiter);
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(line_no, fields)) {
        if (first) {
            first = false;
            if (detail::looks_like_edge_header(fields)) continue;
        }
        if (fields.size() != 3 && fields.size() != 4) {
            result.issues.push_back({line_no, "expected 3 or 4 fields, got " +
                                                  std::to_string(fields.size())});
            continue;
        }
        InteractionRecord rec;
        rec.source = fields[0];
        rec.target = fields[1];
        if (rec.source.empty() || rec.target.empty()) {
            result.issues.push_back({line_no, "empty node identifier"});
            continue;
        }
        if (!parse_double(fields[2], rec.timestamp)) {
            result.issues.push_back({line_no, "unparseable timestamp '" + fields[2] + "'"});
            continue;
        }
        if (fields.size() == 4) {
            if (!parse_double(fields[3], rec.weight)) {
                result.issues.push_back({line_no, "unparseable weight '" + fields[3] + "'"});
                continue;
            }
            if (rec.weight < 0.0) {
                result.issues.push_back({line_no, "negative weight"});
                continue;
            }
        }
        if (rec.source == rec.target) {
            ++result.self_loops_dropped;
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const InteractionRecord& a, const InteractionRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return result;
}

enum class TimestampUnit { days, seconds };

inline const char* timestamp_unit_name(TimestampUnit unit) {
    return unit == TimestampUnit::days ? "days" : "seconds";
}

/// Sliding-window framing: frame k (1-based) spans
/// [origin + (k-1)*step, origin + (k-1)*step + length).
struct WindowPlan {
    double length = 90.0;
    double step = 45.0;
    double origin = 1.0;

    void validate() const {
        if (!(length > 0.0)) throw Error("window length must be positive");
        if (!(step > 0.0)) throw Error("window step must be positive");
        if (step > length) throw Error("window step must not exceed window length");
    }

    double frame_start(int k) const { return origin + (k - 1) * step; }
    double frame_end(int k) const { return frame_start(k) + length; }
};

/// Directed edge inside one snapshot; target is a local node index.
struct Arc {
    std::uint32_t target = 0;
    double weight = 0.0;      // aggregated raw weight within the frame
    double commitment = 0.0;  // weight / sum of the source's outgoing weights
};

/// One frame's directed weighted graph. Nodes are global ids, sorted; the
/// position in `nodes` is the local index used by `out`.
struct Snapshot {
    int frame_index = 0;
    double start = 0.0;
    double end = 0.0;
    std::vector<NodeId> nodes;
    std::vector<std::vector<Arc>> out;  // indexed by local node index

    std::size_t node_count() const { return nodes.size(); }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& arcs : out) n += arcs.size();
        return n;
    }

    std::optional<std::uint32_t> local_index(NodeId id) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
        if (it == nodes.end() || *it != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - nodes.begin());
    }

    bool contains(NodeId id) const { return local_index(id).has_value(); }
};

/// Identifier <-> dense id mapping, sorted lexicographically so ids do not
/// depend on input order.
struct NodeTable {
    std::vector<std::string> names;  // index = NodeId
    std::unordered_map<std::string, NodeId> index;

    static NodeTable from_names(std::vector<std::string> sorted_unique) {
        NodeTable table;
        table.names = std::move(sorted_unique);
        table.index.reserve(table.names.size());
        for (NodeId i = 0; i < table.names.size(); ++i) table.index.emplace(table.names[i], i);
        return table;
    }

    std::optional<NodeId> id_of(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name_of(NodeId id) const { return names.at(id); }
    std::size_t size() const { return names.size(); }
};

struct TemporalNetwork {
    WindowPlan plan;
    TimestampUnit unit = TimestampUnit::days;
    NodeTable nodes;
    std::vector<Snapshot> frames;  // frame_index 1..m, contiguous
    std::size_t skipped_before_origin = 0;
    std::size_t self_loops_dropped = 0;

    std::size_t frame_count() const { return frames.size(); }
};

namespace detail {

/// Finalize one snapshot from aggregated (source,target)->weight sums.
/// Commitments are normalized per source; arcs whose source has zero total
/// outgoing weight are dropped (the node stays active but commits nothing).
inline Snapshot finish_snapshot(int frame_index, double start, double end,
                                const std::map<std::pair<NodeId, NodeId>, double>& agg) {
    Snapshot snap;
    snap.frame_index = frame_index;
    snap.start = start;
    snap.end = end;
    for (const auto& [key, w] : agg) {
        snap.nodes.push_back(key.first);
        snap.nodes.push_back(key.second);
        (void)w;
    }
    std::sort(snap.nodes.begin(), snap.nodes.end());
    snap.nodes.erase(std::unique(snap.nodes.begin(), snap.nodes.end()), snap.nodes.end());
    snap.out.assign(snap.nodes.size(), {});
    for (const auto& [key, w] : agg) {
        auto src = snap.local_index(key.first);
        auto dst = snap.local_index(key.second);
        snap.out[*src].push_back({*dst, w, 0.0});
    }
    for (auto& arcs : snap.out) {
        std::sort(arcs.begin(), arcs.end(),
                  [](const Arc& a, const Arc& b) { return a.target < b.target; });
        double total = 0.0;
        for (const Arc& a : arcs) total += a.weight;
        if (total > 0.0) {
            for (Arc& a : arcs) a.commitment = a.weight / total;
        } else {
            arcs.clear();  // zero-weight interactions mark presence only
        }
    }
    return snap;
}

}  // namespace detail

/// Slice records into frames per the plan and build one snapshot per frame.
/// A record lands in every frame whose span contains its timestamp; the frame
/// count is the smallest m whose frames cover the last timestamp.
inline TemporalNetwork build_frames(const std::vector<InteractionRecord>& records,
                                    const WindowPlan& plan,
                                    TimestampUnit unit = TimestampUnit::days) {
    plan.validate();
    if (records.empty()) throw Error("no interaction records");

    TemporalNetwork net;
    net.plan = plan;
    net.unit = unit;

    double last_ts = plan.origin;
    bool any_in_range = false;
    std::vector<std::string> names;
    for (const auto& rec : records) {
        if (rec.source == rec.target) continue;
        if (rec.timestamp < plan.origin) continue;
        any_in_range = true;
        last_ts = std::max(last_ts, rec.timestamp);
        names.push_back(rec.source);
        names.push_back(rec.target);
    }
    if (!any_in_range) throw Error("no records fall inside [origin, inf)");
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    net.nodes = NodeTable::from_names(std::move(names));

    int m = 1;
    while (plan.frame_end(m) <= last_ts) ++m;

    std::vector<std::map<std::pair<NodeId, NodeId>, double>> agg(static_cast<std::size_t>(m));
    for (const auto& rec : records) {
        if (rec.source == rec.target) {
            ++net.self_loops_dropped;
            continue;
        }
        if (rec.timestamp < plan.origin) {
            ++net.skipped_before_origin;
            continue;
        }
        NodeId src = *net.nodes.id_of(rec.source);
        NodeId dst = *net.nodes.id_of(rec.target);
        int k_hi = std::min(m, 1 + static_cast<int>(std::floor((rec.timestamp - plan.origin) / plan.step)));
        for (int k = k_hi; k >= 1; --k) {
            if (plan.frame_end(k) <= rec.timestamp) break;
            if (rec.timestamp >= plan.frame_start(k))
                agg[static_cast<std::size_t>(k - 1)][{src, dst}] += rec.weight;
        }
    }

    net.frames.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k)
        net.frames.push_back(detail::finish_snapshot(k, plan.frame_start(k), plan.frame_end(k),
                                                     agg[static_cast<std::size_t>(k - 1)]));
    return net;
}

/// Build a standalone snapshot over nodes 0..n-1 from weighted arcs.
/// Intended for tests and synthetic data; node ids are used as-is.
inline Snapshot make_snapshot(int frame_index, std::size_t n_nodes,
                              const std::vector<std::tuple<NodeId, NodeId, double>>& arcs) {
    Snapshot snap;
    snap.frame_index = frame_index;
    snap.nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) snap.nodes[i] = static_cast<NodeId>(i);
    snap.out.assign(n_nodes, {});
    std::map<std::pair<NodeId, NodeId>, double> agg;
    for (const auto& [src, dst, w] : arcs) {
        if (src == dst) continue;
        if (src >= n_nodes || dst >= n_nodes) throw Error("arc endpoint out of range");
        agg[{src, dst}] += w;
    }
    for (const auto& [key, w] : agg) snap.out[key.first].push_back({key.second, w, 0.0});
    for (auto& out : snap.out) {
        double total = 0.0;
        for (const Arc& a : out) total += a.weight;
        if (total > 0.0)
            for (Arc& a : out) a.commitment = a.weight / total;
        else
            out.clear();
    }
    return snap;
}

/// Frames manifest: one row per frame with span and size counts.
inline void write_frames_manifest(const TemporalNetwork& net, const std::filesystem::path& path,
                                  char delimiter = ',') {
    DelimitedWriter w(path, delimiter);
    w.row({"frame_index", "start", "end", "node_count", "edge_count"});
    for (const Snapshot& s : net.frames)
        w.row({std::to_string(s.frame_index), format_double(s.start), format_double(s.end),
               std::to_string(s.node_count()), std::to_string(s.edge_count())});
    w.flush_and_check();
}

struct FrameManifestRow {
    int frame_index = 0;
    double start = 0.0;
    double end = 0.0;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
};

inline std::vector<FrameManifestRow> read_frames_manifest(const std::filesystem::path& path,
                                                          char delimiter = ',') {
    DelimitedReader reader(path, delimiter);
    std::vector<FrameManifestRow> rows;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(line_no, fields)) {
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "frame_index") continue;
        }
        if (fields.size() != 5) throw Error("frames manifest: bad row at line " + std::to_string(line_no));
        FrameManifestRow row;
        long v = 0;
        if (!parse_long(fields[0], v)) throw Error("frames manifest: bad frame index");
        row.frame_index = static_cast<int>(v);
        if (!parse_double(fields[1], row.start) || !parse_double(fields[2], row.end))
            throw Error("frames manifest: bad span");
        long nc = 0, ec = 0;
        if (!parse_long(fields[3], nc) || !parse_long(fields[4], ec))
            throw Error("frames manifest: bad counts");
        row.node_count = static_cast<std::size_t>(nc);
        row.edge_count = static_cast<std::size_t>(ec);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gevo
