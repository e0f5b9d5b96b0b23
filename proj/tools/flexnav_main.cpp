// flexnav: discrete graph-world navigation harness CLI.
//
//   flexnav run    --graphs DIR --episodes FILE --config FILE --out DIR
//                  [--providers mock|replay:DIR|live] [--record DIR]
//   flexnav eval   --results FILE
//   flexnav gen    --nodes N --floors F --seed S --out FILE
//   flexnav trace  --run DIR --graphs DIR --episode ID --out FILE

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexnav/flexnav.hpp"
#include "flexnav/live.hpp"

namespace fs = std::filesystem;
using namespace flexnav;

namespace {

int cmd_run(const std::string& graphs_dir, const std::string& episodes_file,
            const std::string& config_file, const std::string& out_dir,
            const std::string& providers, const std::string& record_dir) {
    runner::RunConfig config = config_file.empty()
                                   ? runner::RunConfig{}
                                   : runner::RunConfig::from_file(config_file);

    runner::ProviderFactory factory;
    if (providers == "mock") {
        factory = runner::mock_factory();
    } else if (providers.rfind("replay:", 0) == 0) {
        factory = runner::replay_factory(providers.substr(7));
    } else if (providers == "live") {
        factory = runner::live_factory();
    } else {
        std::cerr << "unknown --providers value '" << providers
                  << "' (expected mock, replay:DIR, or live)\n";
        return 2;
    }

    auto dataset = runner::load_dataset(graphs_dir, episodes_file);
    for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << "\n";

    runner::BatchOptions options;
    options.out_dir = out_dir;
    if (!record_dir.empty()) options.record_dir = record_dir;

    auto outcome = runner::run_batch(config, dataset, factory, options);
    std::cout << runner::summary_table(outcome.report);
    std::cout << "provider calls: " << outcome.provider_calls
              << "  est. tokens: " << outcome.est_tokens << "  provider wall time: "
              << format_fixed1(outcome.wall_ms / 1000.0) << " s\n";
    std::cout << "results written to " << (fs::path(out_dir) / "results.jsonl").string()
              << "\n";
    return 0;
}

int cmd_eval(const std::string& results_file) {
    std::ifstream in(results_file);
    if (!in) {
        std::cerr << "cannot open " << results_file << "\n";
        return 2;
    }
    std::vector<metrics::EpisodeMetrics> all;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        const auto& mj = j.at("metrics");
        metrics::EpisodeMetrics m;
        m.geodesics_finite = mj.at("geodesics_finite").get<bool>();
        m.tl = mj.at("tl").get<double>();
        m.sr = mj.at("sr").get<int>();
        m.osr = mj.at("osr").get<int>();
        m.spl = mj.at("spl").get<double>();
        m.rgs = mj.at("rgs").get<int>();
        m.rgspl = mj.at("rgspl").get<double>();
        if (m.geodesics_finite) {
            m.ne = mj.at("ne").get<double>();
            m.gp = mj.at("gp").get<double>();
        }
        all.push_back(m);
    }
    std::cout << runner::summary_table(metrics::aggregate(all));
    return 0;
}

int cmd_gen(int nodes, int floors, std::uint64_t seed, const std::string& out_file) {
    auto graph = envgen::generate_environment(nodes, floors, seed);
    envgraph::save_graph(graph, out_file);
    std::cout << "wrote " << out_file << " (" << graph.size() << " viewpoints)\n";
    return 0;
}

int cmd_trace(const std::string& run_dir, const std::string& graphs_dir,
              const std::string& episode_id, const std::string& out_file) {
    std::ifstream in(fs::path(run_dir) / "results.jsonl");
    if (!in) {
        std::cerr << "cannot open " << run_dir << "/results.jsonl\n";
        return 2;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.at("episode").get<std::string>() != episode_id) continue;
        auto graph = envgraph::load_graph(fs::path(graphs_dir) /
                                          (j.at("scan").get<std::string>() + ".json"));
        std::ofstream out(out_file);
        out << runner::trajectory_dot(graph,
                                      j.at("trajectory").get<std::vector<std::string>>());
        std::cout << "wrote " << out_file << "\n";
        return 0;
    }
    std::cerr << "episode '" << episode_id << "' not found in " << run_dir << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flexnav: hierarchical graph-world navigation harness"};
    app.require_subcommand(1);

    std::string graphs_dir, episodes_file, config_file, out_dir, record_dir;
    std::string providers = "mock";
    auto* run = app.add_subcommand("run", "run a batch of episodes");
    run->add_option("--graphs", graphs_dir, "directory of <scan>.json environment files")
        ->required();
    run->add_option("--episodes", episodes_file, "episodes file")->required();
    run->add_option("--config", config_file, "run config file (JSON)");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--providers", providers, "mock | replay:DIR | live");
    run->add_option("--record", record_dir, "record provider traffic to DIR");

    std::string results_file;
    auto* eval = app.add_subcommand("eval", "aggregate a results file");
    eval->add_option("--results", results_file, "results.jsonl from a run")->required();

    int nodes = 12, floors = 2;
    std::uint64_t seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic environment");
    gen->add_option("--nodes", nodes, "number of viewpoints");
    gen->add_option("--floors", floors, "number of floors");
    gen->add_option("--seed", seed, "generation seed");
    gen->add_option("--out", gen_out, "output environment file")->required();

    std::string run_dir, episode_id, dot_out;
    std::string trace_graphs;
    auto* trace = app.add_subcommand("trace", "export a walked trajectory as DOT");
    trace->add_option("--run", run_dir, "run output directory")->required();
    trace->add_option("--graphs", trace_graphs, "directory of environment files")
        ->required();
    trace->add_option("--episode", episode_id, "episode id")->required();
    trace->add_option("--out", dot_out, "output DOT file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(graphs_dir, episodes_file, config_file, out_dir, providers,
                           record_dir);
        if (eval->parsed()) return cmd_eval(results_file);
        if (gen->parsed()) return cmd_gen(nodes, floors, seed, gen_out);
        if (trace->parsed()) return cmd_trace(run_dir, trace_graphs, episode_id, dot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
