#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/execute.hpp"
#include "flexnav/locate.hpp"
#include "flexnav/metrics.hpp"
#include "flexnav/mocks.hpp"
#include "flexnav/perceive.hpp"
#include "flexnav/plan.hpp"
#include "flexnav/providers.hpp"
#include "flexnav/telemetry.hpp"
#include "flexnav/textualize.hpp"
#include "flexnav/verify.hpp"

namespace flexnav::runner {

// ---------------------------------------------------------------------------
// Provider roles

inline const std::vector<std::string>& provider_roles() {
    static const std::vector<std::string> roles{
        "planner", "verifier", "perceiver", "tiebreaker", "extractor", "scorer",
        "follower0", "follower1", "follower2",
    };
    return roles;
}

struct ProviderBinding {
    std::string endpoint;  // empty -> FLEXNAV_API_BASE
    std::string model;
    double timeout_s = 30.0;
    int retries = 2;
    bool serialize = false;   // provider requires serialized access
    int max_concurrent = 0;   // 0 = unlimited
};

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    int max_planner_iterations = 10;  // global planner-call budget
    int max_moves_per_guidance = 5;
    int replan_cap = 3;
    int parse_retries = 2;
    execute::ContextMode guidance_context_mode = execute::ContextMode::Multi;
    textualize::HistoryStyle history_style = textualize::HistoryStyle::Landmark;
    bool history_include_guidance = false;
    std::string violation_policy = "warn";  // warn | strict
    std::uint64_t seed = 0;
    int parallelism = 1;
    int follower_count = 3;
    plan::SystemPrinciple principle = plan::SystemPrinciple::defaults();
    std::map<std::string, ProviderBinding> providers;

    void validate() const {
        if (max_planner_iterations < 1 || max_moves_per_guidance < 1 || replan_cap < 1 ||
            parallelism < 1 || follower_count < 1)
            throw ConfigError("all budgets and degrees must be >= 1");
        if (violation_policy != "warn" && violation_policy != "strict")
            throw ConfigError("violation_policy must be warn or strict");
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        auto get_int = [&](const char* key, int& out) {
            if (j.contains(key)) out = j.at(key).get<int>();
        };
        get_int("max_planner_iterations", c.max_planner_iterations);
        get_int("max_moves_per_guidance", c.max_moves_per_guidance);
        get_int("replan_cap", c.replan_cap);
        get_int("parse_retries", c.parse_retries);
        get_int("parallelism", c.parallelism);
        get_int("follower_count", c.follower_count);
        if (j.contains("guidance_context_mode"))
            c.guidance_context_mode = execute::context_mode_from_string(
                j.at("guidance_context_mode").get<std::string>());
        if (j.contains("history_style"))
            c.history_style =
                textualize::history_style_from_string(j.at("history_style").get<std::string>());
        if (j.contains("history_include_guidance"))
            c.history_include_guidance = j.at("history_include_guidance").get<bool>();
        if (j.contains("violation_policy"))
            c.violation_policy = j.at("violation_policy").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("principle")) {
            const auto& p = j.at("principle");
            auto get = [&](const char* key, std::string& out) {
                if (p.contains(key)) out = p.at(key).get<std::string>();
            };
            get("role", c.principle.role);
            get("objective", c.principle.objective);
            get("input_definitions", c.principle.input_definitions);
            get("output_requirements", c.principle.output_requirements);
            get("abilities", c.principle.abilities);
            get("constraints", c.principle.constraints);
        }
        if (j.contains("providers")) {
            for (const auto& [role, pj] : j.at("providers").items()) {
                ProviderBinding b;
                if (pj.contains("endpoint")) b.endpoint = pj.at("endpoint").get<std::string>();
                if (pj.contains("model")) b.model = pj.at("model").get<std::string>();
                if (pj.contains("timeout_s")) b.timeout_s = pj.at("timeout_s").get<double>();
                if (pj.contains("retries")) b.retries = pj.at("retries").get<int>();
                if (pj.contains("serialize")) b.serialize = pj.at("serialize").get<bool>();
                if (pj.contains("max_concurrent"))
                    b.max_concurrent = pj.at("max_concurrent").get<int>();
                c.providers[role] = b;
            }
        }
        c.validate();
        return c;
    }

    static RunConfig from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config parse error in " + path.string() + ": " + e.what());
        }
        return from_json(j);
    }

    ProviderBinding binding(const std::string& role) const {
        auto it = providers.find(role);
        return it == providers.end() ? ProviderBinding{} : it->second;
    }
};

// ---------------------------------------------------------------------------
// Provider sets and factories

struct ProviderSet {
    ProviderPtr perceiver;
    ProviderPtr planner;
    ProviderPtr verifier;
    std::vector<ProviderPtr> followers;
    ProviderPtr tiebreaker;
    ProviderPtr extractor;
    ProviderPtr scorer;

    ProviderPtr& by_role(const std::string& role) {
        if (role == "perceiver") return perceiver;
        if (role == "planner") return planner;
        if (role == "verifier") return verifier;
        if (role == "tiebreaker") return tiebreaker;
        if (role == "extractor") return extractor;
        if (role == "scorer") return scorer;
        if (role.rfind("follower", 0) == 0) {
            size_t idx = std::stoul(role.substr(8));
            if (followers.size() <= idx) followers.resize(idx + 1);
            return followers[idx];
        }
        throw ConfigError("unknown provider role '" + role + "'");
    }

    void for_each(const std::function<void(const std::string&, ProviderPtr&)>& fn) {
        fn("perceiver", perceiver);
        fn("planner", planner);
        fn("verifier", verifier);
        for (size_t i = 0; i < followers.size(); ++i)
            fn("follower" + std::to_string(i), followers[i]);
        fn("tiebreaker", tiebreaker);
        fn("extractor", extractor);
        fn("scorer", scorer);
    }
};

using ProviderFactory = std::function<ProviderSet(
    const envgraph::NavGraph&, const envgraph::Episode&, const RunConfig&)>;

// All-mock set: deterministic graph-aware references for every role.
inline ProviderSet mock_provider_set(const envgraph::NavGraph& graph,
                                     const envgraph::Episode& episode,
                                     const RunConfig& config) {
    ProviderSet set;
    set.perceiver = std::make_shared<mocks::MockScenePerceiver>();
    set.planner = std::make_shared<mocks::RouteMockPlanner>(
        graph, episode, std::max(1, config.max_moves_per_guidance - 1));
    set.verifier = std::make_shared<mocks::AlwaysFeasibleVerifier>();
    for (int i = 0; i < config.follower_count; ++i)
        set.followers.push_back(std::make_shared<mocks::LandmarkFollower>(graph));
    set.tiebreaker = std::make_shared<mocks::FirstOptionTieBreaker>();
    std::vector<std::string> extra;
    for (const auto& [_, vp] : graph.viewpoints())
        for (const auto& obj : vp.objects) extra.push_back(obj.name);
    set.extractor = std::make_shared<mocks::NounPhraseExtractor>(extra);
    set.scorer = std::make_shared<mocks::OverlapScorer>();
    return set;
}

inline ProviderFactory mock_factory() {
    return [](const envgraph::NavGraph& g, const envgraph::Episode& e, const RunConfig& c) {
        return mock_provider_set(g, e, c);
    };
}

// Replay set: every role reads its traffic back from
// <dir>/<episode_id>/<role>.jsonl.
inline ProviderFactory replay_factory(const std::filesystem::path& dir) {
    return [dir](const envgraph::NavGraph&, const envgraph::Episode& episode,
                 const RunConfig& config) {
        ProviderSet set;
        auto base = dir / episode.id;
        for (const auto& role : provider_roles()) {
            bool is_follower = role.rfind("follower", 0) == 0;
            if (is_follower && std::stoi(role.substr(8)) >= config.follower_count) continue;
            set.by_role(role) = std::make_shared<ReplayProvider>(base / (role + ".jsonl"));
        }
        set.followers.resize(config.follower_count);
        return set;
    };
}

// Wraps every provider with a recorder writing to
// <dir>/<episode_id>/<role>.jsonl.
inline void add_recording(ProviderSet& set, const std::filesystem::path& dir,
                          const std::string& episode_id) {
    set.for_each([&](const std::string& role, ProviderPtr& p) {
        if (p) p = std::make_shared<RecordingProvider>(p, dir / episode_id /
                                                              (role + ".jsonl"));
    });
}

// Applies the binding's declared concurrency constraints.
inline void apply_concurrency_declarations(ProviderSet& set, const RunConfig& config) {
    set.for_each([&](const std::string& role, ProviderPtr& p) {
        if (!p) return;
        auto b = config.binding(role);
        if (b.serialize) p = std::make_shared<SerializedProvider>(p);
        else if (b.max_concurrent > 0)
            p = std::make_shared<ConcurrencyLimitedProvider>(p, b.max_concurrent);
    });
}

// ---------------------------------------------------------------------------
// Episode state and orchestration

struct EpisodeState {
    execute::AgentPose pose;
    execute::MemoryMap map;
    plan::NavHistory history;
    std::vector<std::string> guidances;
    int planner_iterations = 0;
    int planner_calls_budgeted = 0;
    CostLedger ledger;
    Trace trace;
};

struct EpisodeRun {
    metrics::EpisodeResult result;
    metrics::EpisodeMetrics metric_values;
    CostLedger ledger;
    Trace trace;
};

// The five-step state machine for one episode:
//   loop { Perceive; plan/verify; if Finished break; execute; update history }
//   until Finished or the planner-call budget runs out, then locate the
//   target object at the final node.
// Unrecoverable provider failures mark the result aborted instead of
// propagating, so a batch never dies on one episode.
inline EpisodeRun run_episode(const RunConfig& config, const envgraph::NavGraph& graph,
                              const envgraph::Episode& episode, const ProviderSet& raw) {
    config.validate();
    episode.validate_against(graph);

    EpisodeState state;
    state.pose = {episode.start_viewpoint, normalize_heading(episode.start_heading)};
    state.map.visit(state.pose.node);
    Rng rng(derive_seed(config.seed, episode.id));
    WarnFn warn = [&state](const std::string& msg) { state.trace.warning(msg); };

    // per-episode instrumentation around the shared providers
    auto wrap = [&](const ProviderPtr& p, const std::string& role) -> ProviderPtr {
        if (!p) return nullptr;
        return std::make_shared<InstrumentedProvider>(p, role, state.ledger, state.trace);
    };
    ProviderPtr perceiver = wrap(raw.perceiver, "perceiver");
    ProviderPtr planner = wrap(raw.planner, "planner");
    ProviderPtr verifier = wrap(raw.verifier, "verifier");
    ProviderPtr tiebreaker = wrap(raw.tiebreaker, "tiebreaker");
    ProviderPtr extractor = wrap(raw.extractor, "extractor");
    ProviderPtr scorer = wrap(raw.scorer, "scorer");
    std::vector<ProviderPtr> followers;
    std::vector<Provider*> follower_ptrs;
    for (size_t i = 0; i < raw.followers.size(); ++i) {
        followers.push_back(wrap(raw.followers[i], "follower" + std::to_string(i)));
        follower_ptrs.push_back(followers.back().get());
    }

    const std::string principle = plan::build_system_principle(config.principle);
    std::vector<std::string> trajectory{state.pose.node};
    bool aborted = false;
    bool finished = false;

    try {
        while (state.planner_calls_budgeted < config.max_planner_iterations) {
            // Step 1: perception
            auto observation = with_retries(config.binding("perceiver").retries, warn, [&] {
                return perceive::perceive(*perceiver, graph, state.pose.node,
                                          state.pose.heading);
            });

            // Steps 2 & 3: plan and verify, with bounded re-planning
            verify::PlanVerifyContext ctx{
                *planner,
                *verifier,
                principle,
                episode.instruction,
                state.history,
                observation,
                config.replan_cap,
                config.max_planner_iterations - state.planner_calls_budgeted,
                config.parse_retries,
                config.binding("verifier").retries,
                config.violation_policy == "strict",
                config.history_include_guidance,
                warn};
            auto planned = verify::plan_verify_loop(ctx);
            state.planner_calls_budgeted += planned.planner_calls_budgeted;
            state.planner_iterations += 1;

            if (planned.output.finished()) {
                state.trace.state("planner declared navigation finished");
                finished = true;
                break;
            }
            const plan::Guidance guidance = *planned.output.guidance;
            state.guidances.push_back(guidance.text);

            // Step 4: ensemble execution
            execute::ExecutionContext exec_ctx{graph,
                                               follower_ptrs,
                                               tiebreaker.get(),
                                               config.max_moves_per_guidance,
                                               config.guidance_context_mode,
                                               warn};
            auto segment =
                execute::execute_guidance(exec_ctx, state.pose, state.map, state.guidances,
                                          rng);
            for (const auto& step : segment.steps) trajectory.push_back(step.to);
            state.history.append(
                textualize::describe_trajectory(segment, config.history_style),
                guidance.text);
        }
        if (!finished)
            state.trace.state("planner-call budget exhausted; treating current node as final");
    } catch (const Error& e) {
        state.trace.warning(std::string("episode aborted: ") + e.what());
        aborted = true;
    }

    metrics::EpisodeResult result;
    result.episode = episode;
    result.trajectory = trajectory;
    result.final_node = trajectory.back();
    result.planner_iterations = state.planner_iterations;
    result.aborted = aborted;

    // Step 5: object localization (skipped when the pipeline aborted)
    if (!aborted) {
        std::string phrase;
        try {
            phrase = with_retries(config.binding("extractor").retries, warn, [&] {
                return locate::extract_target(*extractor, episode.instruction, warn);
            });
        } catch (const ProviderError& e) {
            warn(std::string("target extraction unavailable; using full instruction: ") +
                 e.what());
            phrase = episode.instruction;
        }
        try {
            result.localization = with_retries(config.binding("scorer").retries, warn, [&] {
                return locate::run_locator(*scorer, graph, result.final_node, phrase, warn);
            });
        } catch (const ProviderError& e) {
            warn(std::string("object scoring unavailable; grounding fails: ") + e.what());
            result.localization = {};
            result.localization.target_phrase = phrase;
        }
    }

    EpisodeRun run;
    run.result = std::move(result);
    run.metric_values = metrics::compute_metrics(graph, run.result);
    run.ledger = std::move(state.ledger);
    run.trace = std::move(state.trace);
    return run;
}

// ---------------------------------------------------------------------------
// Per-step reference runner
//
// Queries the planner role once per movement (the style of purely LLM-driven
// agents) and exists solely as the comparison point for the call-efficiency
// property: a hierarchical run should need far fewer planner calls.
//
//   request: {"history":[visited...], "instruction":..., "neighbors":[...],
//             "node":...}  ->  response: neighbor id | STOP

inline EpisodeRun per_step_baseline(const RunConfig& config,
                                    const envgraph::NavGraph& graph,
                                    const envgraph::Episode& episode,
                                    const ProviderPtr& planner_raw) {
    EpisodeState state;
    state.pose = {episode.start_viewpoint, normalize_heading(episode.start_heading)};
    WarnFn warn = [&state](const std::string& msg) { state.trace.warning(msg); };
    auto planner = std::make_shared<InstrumentedProvider>(planner_raw, "planner",
                                                          state.ledger, state.trace);

    std::vector<std::string> trajectory{state.pose.node};
    const int step_cap = config.max_planner_iterations * config.max_moves_per_guidance;
    bool aborted = false;
    try {
        for (int step = 0; step < step_cap; ++step) {
            nlohmann::json req{{"history", trajectory},
                               {"instruction", episode.instruction},
                               {"neighbors", graph.neighbors(state.pose.node)},
                               {"node", state.pose.node}};
            std::string answer = trim(planner->complete(req.dump()));
            if (iequals(answer, execute::kStopToken)) break;
            auto neighbors = graph.neighbors(state.pose.node);
            if (std::find(neighbors.begin(), neighbors.end(), answer) == neighbors.end()) {
                warn("per-step planner proposed non-neighbor '" + answer + "'; stopping");
                break;
            }
            try {
                state.pose.heading = envgraph::heading_between(
                    graph.viewpoint(state.pose.node).pose,
                    graph.viewpoint(answer).pose.position);
            } catch (const ValidationError&) {
            }
            state.pose.node = answer;
            trajectory.push_back(answer);
        }
    } catch (const Error& e) {
        warn(std::string("baseline aborted: ") + e.what());
        aborted = true;
    }

    EpisodeRun run;
    run.result.episode = episode;
    run.result.trajectory = trajectory;
    run.result.final_node = trajectory.back();
    run.result.aborted = aborted;
    run.metric_values = metrics::compute_metrics(graph, run.result);
    run.ledger = std::move(state.ledger);
    run.trace = std::move(state.trace);
    return run;
}

// ---------------------------------------------------------------------------
// Dataset ingestion
//
// episodes file: {"episodes": [{"id","scan","instruction","start","heading",
//                 "goals":[...],"target_object"}, ...]}
// graph dir: one environment file per scan, named <scan>.json.

struct DatasetEpisode {
    std::string scan;
    envgraph::Episode episode;
};

struct Dataset {
    std::map<std::string, envgraph::NavGraph> graphs;
    std::vector<DatasetEpisode> episodes;
    std::vector<std::string> warnings;
};

inline Dataset load_dataset(const std::filesystem::path& graph_dir,
                            const std::filesystem::path& episodes_file) {
    std::ifstream in(episodes_file);
    if (!in) throw ParseError("cannot open episodes file: " + episodes_file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("episodes parse error in " + episodes_file.string() + ": " +
                         e.what());
    }

    Dataset dataset;
    std::vector<std::string> errors;
    if (!j.contains("episodes") || !j.at("episodes").is_array()) {
        throw ValidationError("episodes file must contain an 'episodes' array");
    }
    size_t index = 0;
    for (const auto& ej : j.at("episodes")) {
        std::string label = "episode[" + std::to_string(index++) + "]";
        try {
            DatasetEpisode de;
            de.scan = ej.at("scan").get<std::string>();
            de.episode.id = ej.at("id").get<std::string>();
            de.episode.instruction = ej.at("instruction").get<std::string>();
            de.episode.start_viewpoint = ej.at("start").get<std::string>();
            de.episode.start_heading =
                ej.contains("heading") ? ej.at("heading").get<double>() : 0.0;
            de.episode.goal_viewpoints =
                ej.at("goals").get<std::vector<std::string>>();
            de.episode.target_object = ej.at("target_object").get<std::string>();

            if (!dataset.graphs.count(de.scan)) {
                auto path = graph_dir / (de.scan + ".json");
                dataset.graphs.emplace(de.scan,
                                       envgraph::load_graph(path, &dataset.warnings));
            }
            de.episode.validate_against(dataset.graphs.at(de.scan));
            dataset.episodes.push_back(std::move(de));
        } catch (const std::exception& e) {
            errors.push_back(label + ": " + e.what());
        }
    }
    if (!errors.empty())
        throw ValidationError("dataset has " + std::to_string(errors.size()) +
                              " invalid records:\n  " + join(errors, "\n  "));
    return dataset;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json episode_record_json(const std::string& scan, const EpisodeRun& run) {
    const auto& m = run.metric_values;
    nlohmann::json loc{{"target", run.result.localization.target_phrase}};
    loc["chosen_id"] = run.result.localization.chosen_id
                           ? nlohmann::json(*run.result.localization.chosen_id)
                           : nlohmann::json();
    loc["chosen_name"] = run.result.localization.chosen_name
                             ? nlohmann::json(*run.result.localization.chosen_name)
                             : nlohmann::json();
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : run.result.localization.candidates)
        candidates.push_back({{"id", c.object_id}, {"name", c.name}, {"score", c.score}});
    loc["candidates"] = candidates;

    nlohmann::json mj{{"tl", m.tl},       {"sr", m.sr},   {"osr", m.osr},
                      {"spl", m.spl},     {"rgs", m.rgs}, {"rgspl", m.rgspl},
                      {"geodesics_finite", m.geodesics_finite}};
    // infinities are not representable in JSON; excluded episodes carry null
    mj["ne"] = m.geodesics_finite ? nlohmann::json(m.ne) : nlohmann::json();
    mj["gp"] = m.geodesics_finite ? nlohmann::json(m.gp) : nlohmann::json();

    return nlohmann::json{{"aborted", run.result.aborted},
                          {"episode", run.result.episode.id},
                          {"ledger", run.ledger.to_json()},
                          {"localization", loc},
                          {"metrics", mj},
                          {"planner_iterations", run.result.planner_iterations},
                          {"scan", scan},
                          {"trajectory", run.result.trajectory}};
}

inline nlohmann::json trace_json(const std::string& episode_id, const Trace& trace) {
    return nlohmann::json{{"episode", episode_id}, {"events", trace.to_json()}};
}

inline std::string summary_csv(const metrics::MetricsReport& report,
                               std::uint64_t provider_calls, std::uint64_t est_tokens) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "episodes,excluded,tl,ne,sr,osr,spl,rgs,rgspl,gp,provider_calls,"
                  "est_tokens\n%zu,%zu,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%llu,%llu\n",
                  report.episode_count, report.excluded_count, report.tl, report.ne,
                  report.sr * 100.0, report.osr * 100.0, report.spl * 100.0,
                  report.rgs * 100.0, report.rgspl * 100.0, report.gp,
                  static_cast<unsigned long long>(provider_calls),
                  static_cast<unsigned long long>(est_tokens));
    return buf;
}

inline std::string summary_table(const metrics::MetricsReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%-10s %8s %8s %8s %8s %8s %8s %8s %8s\n"
                  "%-10s %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f\n",
                  "episodes", "TL", "NE", "SR", "OSR", "SPL", "RGS", "RGSPL", "GP",
                  (std::to_string(r.episode_count) + "/" +
                   std::to_string(r.episode_count - r.excluded_count))
                      .c_str(),
                  r.tl, r.ne, r.sr * 100.0, r.osr * 100.0, r.spl * 100.0, r.rgs * 100.0,
                  r.rgspl * 100.0, r.gp);
    return buf;
}

// ---------------------------------------------------------------------------
// Batch runner

struct BatchOptions {
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> record_dir;  // record provider traffic
};

struct BatchOutcome {
    metrics::MetricsReport report;
    std::vector<EpisodeRun> runs;  // in dataset order
    std::uint64_t provider_calls = 0;
    std::uint64_t est_tokens = 0;
    double wall_ms = 0.0;
};

inline BatchOutcome run_batch(const RunConfig& config, const Dataset& dataset,
                              const ProviderFactory& factory, const BatchOptions& options) {
    config.validate();
    std::filesystem::create_directories(options.out_dir / "traces");

    std::vector<EpisodeRun> runs(dataset.episodes.size());
    std::atomic<size_t> next{0};
    std::mutex error_mu;
    std::vector<std::string> hard_errors;

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= dataset.episodes.size()) return;
            const auto& de = dataset.episodes[i];
            try {
                const auto& graph = dataset.graphs.at(de.scan);
                ProviderSet set = factory(graph, de.episode, config);
                if (options.record_dir) add_recording(set, *options.record_dir, de.episode.id);
                apply_concurrency_declarations(set, config);
                runs[i] = run_episode(config, graph, de.episode, set);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                hard_errors.push_back(de.episode.id + ": " + e.what());
            }
        }
    };

    int threads = std::min<int>(config.parallelism,
                                static_cast<int>(std::max<size_t>(1, dataset.episodes.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!hard_errors.empty())
        throw Error("batch failed on " + std::to_string(hard_errors.size()) +
                    " episodes:\n  " + join(hard_errors, "\n  "));

    BatchOutcome outcome;
    std::vector<metrics::EpisodeMetrics> all;
    std::ofstream results(options.out_dir / "results.jsonl");
    for (size_t i = 0; i < runs.size(); ++i) {
        const auto& run = runs[i];
        all.push_back(run.metric_values);
        results << episode_record_json(dataset.episodes[i].scan, run).dump() << "\n";
        std::ofstream trace_out(options.out_dir / "traces" /
                                (run.result.episode.id + ".json"));
        trace_out << trace_json(run.result.episode.id, run.trace).dump(2) << "\n";
        outcome.provider_calls += run.ledger.total_calls();
        outcome.est_tokens += run.ledger.total_estimated_tokens();
        outcome.wall_ms += run.ledger.total_wall_ms();
    }
    outcome.report = metrics::aggregate(all);
    std::ofstream summary(options.out_dir / "summary.csv");
    summary << summary_csv(outcome.report, outcome.provider_calls, outcome.est_tokens);
    outcome.runs = std::move(runs);
    return outcome;
}

// ---------------------------------------------------------------------------
// Trajectory DOT export: the environment graph with the walked path
// highlighted, for figure generation.

inline std::string trajectory_dot(const envgraph::NavGraph& graph,
                                  const std::vector<std::string>& trajectory) {
    std::set<std::pair<std::string, std::string>> walked;
    for (size_t i = 0; i + 1 < trajectory.size(); ++i) {
        const auto& a = trajectory[i];
        const auto& b = trajectory[i + 1];
        walked.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    }
    std::set<std::string> visited(trajectory.begin(), trajectory.end());

    std::string dot = "graph trajectory {\n  node [shape=circle fontsize=10];\n";
    for (const auto& [id, vp] : graph.viewpoints()) {
        dot += "  \"" + id + "\"";
        if (!trajectory.empty() && id == trajectory.front())
            dot += " [style=filled fillcolor=green]";
        else if (!trajectory.empty() && id == trajectory.back())
            dot += " [style=filled fillcolor=red]";
        else if (visited.count(id))
            dot += " [style=filled fillcolor=lightblue]";
        dot += ";\n";
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [id, _] : graph.viewpoints()) {
        for (const auto& nb : graph.neighbors(id)) {
            auto key = id < nb ? std::make_pair(id, nb) : std::make_pair(nb, id);
            if (!seen.insert(key).second) continue;
            dot += "  \"" + key.first + "\" -- \"" + key.second + "\"";
            if (walked.count(key)) dot += " [color=red penwidth=2]";
            dot += ";\n";
        }
    }
    dot += "}\n";
    return dot;
}

}  // namespace flexnav::runner
