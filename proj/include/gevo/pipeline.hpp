#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gevo/asur.hpp"
#include "gevo/evolution.hpp"
#include "gevo/ged.hpp"
#include "gevo/grouping.hpp"
#include "gevo/social_position.hpp"
#include "gevo/temporal_network.hpp"

namespace gevo {

/// Thresholds are accepted either as fractions in [0,1] or as percents
/// (any value above 1), matching the usual percent notation in reports.
inline double parse_threshold_value(const std::string& text) {
    double value = 0.0;
    if (!parse_double(text, value)) throw Error("cannot parse threshold '" + text + "'");
    if (value > 1.0) value /= 100.0;
    if (value < 0.0 || value > 1.0) throw Error("threshold out of range: " + text);
    return value;
}

inline std::vector<double> parse_threshold_list(const std::string& text) {
    std::vector<double> values;
    for (const std::string& field : split_fields(text, ','))
        if (!field.empty()) values.push_back(parse_threshold_value(field));
    return values;
}

inline std::vector<double> default_sweep_axis() {
    return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

struct RunConfig {
    std::filesystem::path edges_path;
    std::filesystem::path groups_path;  // when set, groups come from this file
    std::filesystem::path output_dir = ".";

    char delimiter = ',';
    TimestampUnit unit = TimestampUnit::days;
    WindowPlan plan;          // length 90, step 45, origin 1 by default
    bool origin_auto = true;  // origin = first timestamp unless set explicitly

    SpConfig sp;
    GroupCommitments group_sp_mode = GroupCommitments::renormalized;

    Detector detector = Detector::cpm;
    int k = 6;
    std::uint64_t seed = 42;

    Thresholds thresholds;
    AsurConfig asur;

    std::vector<double> sweep_alphas = default_sweep_axis();
    std::vector<double> sweep_betas = default_sweep_axis();

    void validate() const {
        plan.validate();
        sp.validate();
        thresholds.validate();
        asur.validate();
        if (detector == Detector::cpm && k < 3) throw Error("CPM requires k >= 3");
        if (sweep_alphas.empty() || sweep_betas.empty()) throw Error("sweep grid is empty");
        for (double v : sweep_alphas)
            if (v < 0.0 || v > 1.0 || v <= thresholds.lifecycle)
                throw Error("sweep alpha values must lie in (lifecycle, 1]");
        for (double v : sweep_betas)
            if (v < 0.0 || v > 1.0 || v <= thresholds.lifecycle)
                throw Error("sweep beta values must lie in (lifecycle, 1]");
    }
};

/// Flat key=value config file; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            std::size_t b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key=value");
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

inline void apply_config_entry(RunConfig& config, const std::string& key,
                               const std::string& value) {
    auto as_double = [&](const char* what) {
        double v = 0.0;
        if (!parse_double(value, v)) throw Error(std::string("config: bad ") + what);
        return v;
    };
    auto as_long = [&](const char* what) {
        long v = 0;
        if (!parse_long(value, v)) throw Error(std::string("config: bad ") + what);
        return v;
    };
    if (key == "edges") config.edges_path = value;
    else if (key == "groups") config.groups_path = value;
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "delimiter") {
        if (value == "tab") config.delimiter = '\t';
        else if (value.size() == 1) config.delimiter = value[0];
        else throw Error("config: delimiter must be one character or 'tab'");
    } else if (key == "timestamp_unit") {
        if (value == "days") config.unit = TimestampUnit::days;
        else if (value == "seconds") config.unit = TimestampUnit::seconds;
        else throw Error("config: timestamp_unit must be days or seconds");
    } else if (key == "window_length") config.plan.length = as_double("window_length");
    else if (key == "window_step") config.plan.step = as_double("window_step");
    else if (key == "origin") {
        if (value == "auto") config.origin_auto = true;
        else {
            config.plan.origin = as_double("origin");
            config.origin_auto = false;
        }
    } else if (key == "epsilon") config.sp.epsilon = as_double("epsilon");
    else if (key == "sp_tolerance") config.sp.tolerance = as_double("sp_tolerance");
    else if (key == "sp_max_iterations") config.sp.max_iterations = static_cast<int>(as_long("sp_max_iterations"));
    else if (key == "group_sp") {
        if (value == "renormalize") config.group_sp_mode = GroupCommitments::renormalized;
        else if (value == "global") config.group_sp_mode = GroupCommitments::global_scaled;
        else throw Error("config: group_sp must be renormalize or global");
    } else if (key == "detector") {
        if (value == "cpm") config.detector = Detector::cpm;
        else if (value == "label_prop") config.detector = Detector::label_prop;
        else if (value == "external") config.detector = Detector::external;
        else throw Error("config: detector must be cpm, label_prop or external");
    } else if (key == "k") config.k = static_cast<int>(as_long("k"));
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(as_long("seed"));
    else if (key == "alpha") config.thresholds.alpha = parse_threshold_value(value);
    else if (key == "beta") config.thresholds.beta = parse_threshold_value(value);
    else if (key == "lifecycle") config.thresholds.lifecycle = parse_threshold_value(value);
    else if (key == "match_alpha") config.thresholds.match_alpha = parse_threshold_value(value);
    else if (key == "match_beta") config.thresholds.match_beta = parse_threshold_value(value);
    else if (key == "kappa") config.asur.kappa = parse_threshold_value(value);
    else if (key == "sweep_alphas") config.sweep_alphas = parse_threshold_list(value);
    else if (key == "sweep_betas") config.sweep_betas = parse_threshold_list(value);
    else throw Error("config: unknown key '" + key + "'");
}

inline void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    for (const auto& [key, value] : parse_config_file(path)) apply_config_entry(config, key, value);
}

// --- pipeline stages ---------------------------------------------------------

struct LoadedNetwork {
    IngestResult ingest;
    TemporalNetwork network;
};

inline LoadedNetwork load_network(const RunConfig& config) {
    LoadedNetwork loaded;
    loaded.ingest = ingest_edges(config.edges_path, {config.delimiter});
    if (loaded.ingest.records.empty()) throw Error("edge list contains no usable records");
    WindowPlan plan = config.plan;
    if (config.origin_auto) plan.origin = loaded.ingest.records.front().timestamp;
    loaded.network = build_frames(loaded.ingest.records, plan, config.unit);
    return loaded;
}

struct GroupStage {
    std::vector<GroupSet> sets;
    std::vector<RowIssue> issues;
};

inline GroupStage obtain_groupsets(const RunConfig& config, const TemporalNetwork& network) {
    GroupStage stage;
    if (!config.groups_path.empty() || config.detector == Detector::external) {
        if (config.groups_path.empty()) throw Error("external detector requires a groups file");
        GroupLoadResult loaded = load_groups(config.groups_path, network, config.delimiter);
        stage.sets = std::move(loaded.sets);
        stage.issues = std::move(loaded.issues);
        return stage;
    }
    stage.sets.reserve(network.frame_count());
    for (const Snapshot& frame : network.frames)
        stage.sets.push_back(config.detector == Detector::cpm
                                 ? detect_groups_cpm(frame, config.k)
                                 : detect_groups_labelprop(frame, config.seed));
    return stage;
}

struct PipelineResult {
    EventSummary summary;
    std::size_t event_count = 0;
    std::size_t chain_count = 0;
    std::vector<std::filesystem::path> artifacts;
    std::vector<RowIssue> issues;
};

/// Full run: ingest -> frames -> groups -> events -> chains/summary, writing
/// five artifacts into output_dir and re-reading each one as a consistency
/// check. Output is deterministic for identical inputs.
inline PipelineResult cmd_pipeline(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    LoadedNetwork loaded = load_network(config);
    PipelineResult result;
    result.issues = loaded.ingest.issues;

    GroupStage groups = obtain_groupsets(config, loaded.network);
    for (const RowIssue& issue : groups.issues) result.issues.push_back(issue);

    const auto frames_path = config.output_dir / "frames.csv";
    const auto groups_path = config.output_dir / "groups.csv";
    const auto events_path = config.output_dir / "events.csv";
    const auto chains_txt_path = config.output_dir / "chains.txt";
    const auto chains_json_path = config.output_dir / "chains.json";
    const auto summary_path = config.output_dir / "summary.csv";

    write_frames_manifest(loaded.network, frames_path, config.delimiter);
    save_groups(groups_path, groups.sets, loaded.network.nodes, config.delimiter);

    std::vector<EventRecord> events = detect_events(loaded.network, groups.sets,
                                                    config.thresholds, config.sp,
                                                    config.group_sp_mode);
    write_events_csv(events_path, events, config.delimiter);

    std::vector<EvolutionChain> chains = build_chains(events, groups.sets);
    write_chains_text(chains_txt_path, chains);
    write_chains_json(chains_json_path, chains);

    result.summary = summarize(events);
    write_summary_csv(summary_path, result.summary, config.delimiter);

    // every artifact must parse back cleanly
    if (read_frames_manifest(frames_path, config.delimiter).size() != loaded.network.frame_count())
        throw Error("frames manifest failed to round-trip");
    GroupLoadResult reread = load_groups(groups_path, loaded.network, config.delimiter);
    if (!reread.issues.empty()) throw Error("groups file failed to round-trip");
    if (read_events_csv(events_path, config.delimiter).size() != events.size())
        throw Error("events file failed to round-trip");
    if (read_chains_json(chains_json_path)["chains"].size() != chains.size())
        throw Error("chains export failed to round-trip");

    result.event_count = events.size();
    result.chain_count = chains.size();
    result.artifacts = {frames_path, groups_path, events_path, chains_txt_path, chains_json_path,
                        summary_path};
    return result;
}

// --- threshold sweep ---------------------------------------------------------

struct SweepRow {
    double alpha = 0.0;
    double beta = 0.0;
    std::array<std::size_t, kEventKindCount> counts{};
    std::size_t total = 0;
    std::size_t pairs_passing_both = 0;  // pairs with fwd >= alpha and bwd >= beta
};

struct SweepResult {
    std::vector<SweepRow> rows;
    CacheStats stats;  // cost of the single shared cache build
};

/// One summary row per (alpha, beta) grid cell. SP values and inclusion
/// matrices are computed once and shared by every cell.
inline SweepResult run_sweep(const TemporalNetwork& network, const std::vector<GroupSet>& groupsets,
                             const Thresholds& base, const std::vector<double>& alphas,
                             const std::vector<double>& betas, const SpConfig& sp_config = {},
                             GroupCommitments mode = GroupCommitments::renormalized) {
    InclusionCache cache = build_inclusion_cache(network, groupsets, sp_config, mode);
    SweepResult result;
    result.stats = cache.stats;
    for (double alpha : alphas)
        for (double beta : betas) {
            Thresholds thresholds = base;
            thresholds.alpha = alpha;
            thresholds.beta = beta;
            SweepRow row;
            row.alpha = alpha;
            row.beta = beta;
            EventSummary summary = summarize(classify_events(cache, thresholds));
            row.counts = summary.totals;
            row.total = summary.total;
            for (const InclusionMatrix& matrix : cache.pairs)
                for (const Inclusion& cell : matrix.cells)
                    if (cell.forward >= alpha && cell.backward >= beta) ++row.pairs_passing_both;
            result.rows.push_back(row);
        }
    if (cache.stats.sp_runs != result.stats.sp_runs ||
        cache.stats.inclusion_evaluations != result.stats.inclusion_evaluations)
        throw Error("sweep recomputed SP or inclusion values");
    return result;
}

inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep,
                            char delimiter = ',') {
    DelimitedWriter w(path, delimiter);
    std::vector<std::string> header = {"alpha", "beta"};
    for (const char* name : summary_column_names()) header.push_back(name);
    header.push_back("total");
    w.row(header);
    for (const SweepRow& row : sweep.rows) {
        std::vector<std::string> fields = {format_double(row.alpha * 100.0),
                                           format_double(row.beta * 100.0)};
        for (std::size_t c : row.counts) fields.push_back(std::to_string(c));
        fields.push_back(std::to_string(row.total));
        w.row(fields);
    }
    w.flush_and_check();
}

inline SweepResult cmd_sweep(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    LoadedNetwork loaded = load_network(config);
    GroupStage groups = obtain_groupsets(config, loaded.network);
    SweepResult sweep = run_sweep(loaded.network, groups.sets, config.thresholds,
                                  config.sweep_alphas, config.sweep_betas, config.sp,
                                  config.group_sp_mode);
    write_sweep_csv(config.output_dir / "sweep.csv", sweep, config.delimiter);
    return sweep;
}

// --- method comparison --------------------------------------------------------

struct CompareResult {
    std::size_t ged_events = 0;
    std::size_t asur_events = 0;
    std::size_t pairs_both = 0;
    std::size_t pairs_ged_only = 0;
    std::size_t pairs_asur_only = 0;
    AsurAudit audit;
};

/// Run both methods on the same groupings and diff them at (frame pair,
/// source, target) granularity; also runs the baseline's anomaly audit.
inline CompareResult cmd_compare(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    LoadedNetwork loaded = load_network(config);
    GroupStage groups = obtain_groupsets(config, loaded.network);

    std::vector<EventRecord> ged_events = detect_events(loaded.network, groups.sets,
                                                        config.thresholds, config.sp,
                                                        config.group_sp_mode);
    std::vector<AsurEvent> asur_events = asur_detect(groups.sets, loaded.network, config.asur);

    write_events_csv(config.output_dir / "events_ged.csv", ged_events, config.delimiter);
    write_asur_events_csv(config.output_dir / "events_asur.csv", asur_events, config.delimiter);

    using PairKey = std::tuple<int, std::string, std::string>;
    std::map<PairKey, std::string> ged_kinds, asur_kinds;
    for (const EventRecord& ev : ged_events)
        ged_kinds[{ev.frame_i, ev.source_group, ev.target_group}] = event_kind_name(ev.kind);
    for (const AsurEvent& ev : asur_events) {
        auto add = [&](const std::string& s, const std::string& t) {
            std::string& kinds = asur_kinds[{ev.frame_i, s, t}];
            std::string name = asur_kind_name(ev.kind);
            if (kinds.find(name) == std::string::npos)
                kinds += (kinds.empty() ? "" : "|") + name;
        };
        if (ev.sources.empty()) for (const auto& t : ev.targets) add("", t);
        else if (ev.targets.empty()) for (const auto& s : ev.sources) add(s, "");
        else
            for (const auto& s : ev.sources)
                for (const auto& t : ev.targets) add(s, t);
    }

    std::map<PairKey, std::pair<std::string, std::string>> merged;
    for (const auto& [key, kind] : ged_kinds) merged[key].first = kind;
    for (const auto& [key, kind] : asur_kinds) merged[key].second = kind;

    DelimitedWriter w(config.output_dir / "compare.csv", config.delimiter);
    w.row({"frame_i", "frame_j", "source_group", "target_group", "ged_kind", "asur_kind",
           "status"});
    CompareResult result;
    for (const auto& [key, kinds] : merged) {
        const char* status = kinds.first.empty()   ? "asur_only"
                             : kinds.second.empty() ? "ged_only"
                                                    : "both";
        if (kinds.first.empty()) ++result.pairs_asur_only;
        else if (kinds.second.empty()) ++result.pairs_ged_only;
        else ++result.pairs_both;
        w.row({std::to_string(std::get<0>(key)), std::to_string(std::get<0>(key) + 1),
               std::get<1>(key), std::get<2>(key), kinds.first, kinds.second, status});
    }
    w.flush_and_check();

    result.ged_events = ged_events.size();
    result.asur_events = asur_events.size();
    result.audit = asur_anomaly_audit(asur_events);
    return result;
}

}  // namespace gevo
