// gevo: track how social groups evolve across time-sliced network snapshots.
//
// Subcommands cover the pipeline stages individually (ingest, frames,
// groups, events, chains), the full run (pipeline), a threshold sweep
// (sweep) and a comparison against the overlap-rule baseline (compare).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gevo/pipeline.hpp"

namespace {

struct CliState {
    gevo::RunConfig config;
    std::string config_path;
    std::map<std::string, std::string> overrides;  // flag values, applied after the config file
    std::string events_path;                       // chains subcommand input
};

void add_override(CLI::App* cmd, CliState& state, const std::string& flag, const std::string& key,
                  const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&state, key](const std::string& value) { state.overrides[key] = value; }, help);
}

void add_common_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_path, "flat key=value config file");
    add_override(cmd, state, "--edges", "edges", "edge list file (source,target,timestamp[,weight])");
    add_override(cmd, state, "--out-dir", "output_dir", "output directory");
    add_override(cmd, state, "--delimiter", "delimiter", "field delimiter (single char or 'tab')");
    add_override(cmd, state, "--timestamp-unit", "timestamp_unit", "days or seconds");
    add_override(cmd, state, "--window-length", "window_length", "frame length in timestamp units");
    add_override(cmd, state, "--window-step", "window_step", "frame step in timestamp units");
    add_override(cmd, state, "--origin", "origin", "first frame start, or 'auto'");
    add_override(cmd, state, "--epsilon", "epsilon", "social position damping in (0,1)");
    add_override(cmd, state, "--sp-tolerance", "sp_tolerance", "social position convergence tolerance");
    add_override(cmd, state, "--sp-max-iterations", "sp_max_iterations", "social position iteration cap");
    add_override(cmd, state, "--group-sp", "group_sp", "group commitments: renormalize or global");
    add_override(cmd, state, "--groups", "groups", "externally computed groups file");
    add_override(cmd, state, "--detector", "detector", "cpm, label_prop or external");
    add_override(cmd, state, "--k", "k", "clique size for CPM");
    add_override(cmd, state, "--seed", "seed", "seed for label propagation");
    add_override(cmd, state, "--alpha", "alpha", "forward inclusion threshold (fraction or percent)");
    add_override(cmd, state, "--beta", "beta", "backward inclusion threshold (fraction or percent)");
    add_override(cmd, state, "--lifecycle", "lifecycle", "forming/dissolving threshold");
    add_override(cmd, state, "--match-alpha", "match_alpha", "match-count override for alpha");
    add_override(cmd, state, "--match-beta", "match_beta", "match-count override for beta");
    add_override(cmd, state, "--kappa", "kappa", "baseline overlap threshold");
    add_override(cmd, state, "--sweep-alphas", "sweep_alphas", "comma list of alpha values");
    add_override(cmd, state, "--sweep-betas", "sweep_betas", "comma list of beta values");
}

void finalize_config(CliState& state) {
    if (!state.config_path.empty()) gevo::apply_config_file(state.config, state.config_path);
    for (const auto& [key, value] : state.overrides)
        gevo::apply_config_entry(state.config, key, value);
    if (state.config.edges_path.empty()) throw gevo::Error("no edge list given (--edges)");
    state.config.validate();
}

void print_issues(const std::vector<gevo::RowIssue>& issues) {
    for (const gevo::RowIssue& issue : issues) {
        if (issue.line > 0)
            std::cout << "  line " << issue.line << ": " << issue.message << "\n";
        else
            std::cout << "  " << issue.message << "\n";
    }
}

void print_summary(const gevo::EventSummary& summary) {
    const auto& names = gevo::summary_column_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        std::cout << names[i] << "=" << summary.totals[i] << " ";
    std::cout << "total=" << summary.total << "\n";
}

int run_ingest(CliState& state) {
    finalize_config(state);
    gevo::IngestResult result = gevo::ingest_edges(state.config.edges_path,
                                                   {state.config.delimiter});
    std::cout << "records: " << result.records.size() << "\n";
    std::cout << "self_loops_dropped: " << result.self_loops_dropped << "\n";
    std::cout << "rejected_rows: " << result.issues.size() << "\n";
    print_issues(result.issues);
    return 0;
}

int run_frames(CliState& state) {
    finalize_config(state);
    gevo::LoadedNetwork loaded = gevo::load_network(state.config);
    std::filesystem::create_directories(state.config.output_dir);
    const auto path = state.config.output_dir / "frames.csv";
    gevo::write_frames_manifest(loaded.network, path, state.config.delimiter);
    std::cout << "frames: " << loaded.network.frame_count() << "\n";
    std::cout << "nodes: " << loaded.network.nodes.size() << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int run_groups(CliState& state) {
    finalize_config(state);
    gevo::LoadedNetwork loaded = gevo::load_network(state.config);
    gevo::GroupStage stage = gevo::obtain_groupsets(state.config, loaded.network);
    std::filesystem::create_directories(state.config.output_dir);
    const auto path = state.config.output_dir / "groups.csv";
    gevo::save_groups(path, stage.sets, loaded.network.nodes, state.config.delimiter);
    std::size_t total = 0;
    for (const gevo::GroupSet& set : stage.sets) total += set.groups.size();
    std::cout << "groups: " << total << " across " << stage.sets.size() << " frames\n";
    print_issues(stage.issues);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int run_events(CliState& state) {
    finalize_config(state);
    gevo::LoadedNetwork loaded = gevo::load_network(state.config);
    gevo::GroupStage stage = gevo::obtain_groupsets(state.config, loaded.network);
    std::vector<gevo::EventRecord> events =
        gevo::detect_events(loaded.network, stage.sets, state.config.thresholds, state.config.sp,
                            state.config.group_sp_mode);
    std::filesystem::create_directories(state.config.output_dir);
    const auto path = state.config.output_dir / "events.csv";
    gevo::write_events_csv(path, events, state.config.delimiter);
    print_summary(gevo::summarize(events));
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int run_chains(CliState& state) {
    finalize_config(state);
    if (state.events_path.empty()) throw gevo::Error("chains requires --events");
    gevo::LoadedNetwork loaded = gevo::load_network(state.config);
    gevo::GroupStage stage = gevo::obtain_groupsets(state.config, loaded.network);
    std::vector<gevo::EventRecord> events = gevo::read_events_csv(state.events_path,
                                                                  state.config.delimiter);
    std::vector<gevo::EvolutionChain> chains = gevo::build_chains(events, stage.sets);
    std::filesystem::create_directories(state.config.output_dir);
    const auto txt = state.config.output_dir / "chains.txt";
    const auto json = state.config.output_dir / "chains.json";
    gevo::write_chains_text(txt, chains);
    gevo::write_chains_json(json, chains);
    std::cout << "chains: " << chains.size() << "\n";
    std::cout << "wrote " << txt.string() << " and " << json.string() << "\n";
    return 0;
}

int run_sweep(CliState& state) {
    finalize_config(state);
    gevo::SweepResult sweep = gevo::cmd_sweep(state.config);
    std::cout << "rows: " << sweep.rows.size() << "\n";
    std::cout << "sp_runs: " << sweep.stats.sp_runs
              << " inclusion_evaluations: " << sweep.stats.inclusion_evaluations << "\n";
    std::cout << "wrote " << (state.config.output_dir / "sweep.csv").string() << "\n";
    return 0;
}

int run_compare(CliState& state) {
    finalize_config(state);
    gevo::CompareResult result = gevo::cmd_compare(state.config);
    std::cout << "ged_events: " << result.ged_events << "\n";
    std::cout << "asur_events: " << result.asur_events
              << " distinct: " << result.audit.distinct_events
              << " anomalies: " << result.audit.anomalies.size() << "\n";
    std::cout << "pairs both=" << result.pairs_both << " ged_only=" << result.pairs_ged_only
              << " asur_only=" << result.pairs_asur_only << "\n";
    return 0;
}

int run_pipeline(CliState& state) {
    finalize_config(state);
    gevo::PipelineResult result = gevo::cmd_pipeline(state.config);
    print_summary(result.summary);
    std::cout << "chains: " << result.chain_count << "\n";
    print_issues(result.issues);
    for (const auto& path : result.artifacts) std::cout << "wrote " << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group evolution tracking over temporal network snapshots"};
    app.require_subcommand(1);

    CliState state;
    int (*handler)(CliState&) = nullptr;

    auto add_subcommand = [&](const std::string& name, const std::string& help,
                              int (*fn)(CliState&)) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common_options(cmd, state);
        cmd->callback([&handler, fn]() { handler = fn; });
        return cmd;
    };

    add_subcommand("ingest", "validate an edge list and report diagnostics", run_ingest);
    add_subcommand("frames", "slice the edge stream into frame snapshots", run_frames);
    add_subcommand("groups", "detect or load per-frame groups", run_groups);
    add_subcommand("events", "classify group transitions between frames", run_events);
    CLI::App* chains = add_subcommand("chains", "stitch events into per-group chains", run_chains);
    chains->add_option("--events", state.events_path, "events CSV produced by the events stage");
    add_subcommand("sweep", "event counts across an alpha/beta grid", run_sweep);
    add_subcommand("compare", "diff against the overlap-rule baseline", run_compare);
    add_subcommand("pipeline", "run every stage and write all artifacts", run_pipeline);

    CLI11_PARSE(app, argc, argv);
    try {
        return handler ? handler(state) : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
