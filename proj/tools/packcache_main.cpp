#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "packcache/alloc.hpp"
#include "packcache/cost.hpp"
#include "packcache/trace_io.hpp"

namespace {

using namespace packcache;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << content;
}

PlanSource parse_source(const std::string& v) {
    if (v == "closed_form") return PlanSource::ClosedForm;
    if (v == "normalized") return PlanSource::NormalizedDecay;
    throw std::invalid_argument("source must be closed_form or normalized, got '" + v +
                                "'");
}

MinQuotaMode parse_quota_mode(const std::string& v) {
    if (v == "none") return MinQuotaMode::None;
    if (v == "strict") return MinQuotaMode::Strict;
    if (v == "recent_floor") return MinQuotaMode::RecentFloor;
    throw std::invalid_argument("quota-mode must be none, strict, or recent_floor, got '" +
                                v + "'");
}

struct SimulateArgs {
    std::string config_path;
    std::string trace_path;
    std::string stats_path;
    std::string summary_path;
    std::int64_t stats_frame = 0;  // 0 = last frame
};

int run_simulate(const SimulateArgs& args) {
    const SimConfig cfg = load_config(args.config_path);
    const GenerationTrace trace = run(cfg);
    if (!args.trace_path.empty()) write_file(args.trace_path, trace_csv(trace));
    if (!args.stats_path.empty()) {
        const std::int64_t want = args.stats_frame == 0 ? cfg.frames : args.stats_frame;
        if (want < 1 || want > cfg.frames)
            throw std::invalid_argument("stats-frame out of range: " +
                                        std::to_string(want));
        write_file(args.stats_path, stats_csv(trace.frames[std::size_t(want - 1)]));
    }
    if (!args.summary_path.empty())
        write_file(args.summary_path, summary_json(cfg, trace));
    const auto& last = trace.frames.back();
    std::cout << "frames=" << cfg.frames << " total_attended=" << trace.total_attended
              << " final_occupancy=" << last.occupancy
              << " dropped_frames=" << last.dropped_frames << "\n";
    return 0;
}

struct AllocArgs {
    std::int64_t window = 4;
    std::int64_t budget_total = 4084;
    std::string source = "closed_form";
    std::string rho = "1/2";
    std::string quota_mode = "none";
    std::string b_min = "0";
    std::int64_t quota_frames = 3;
};

int run_alloc(const AllocArgs& args) {
    PlanSpec spec;
    spec.window = args.window;
    spec.budget_total = args.budget_total;
    spec.source = parse_source(args.source);
    spec.rho = parse_rational(args.rho);
    spec.quota_mode = parse_quota_mode(args.quota_mode);
    spec.b_min = parse_rational(args.b_min);
    spec.quota_frames = args.quota_frames;
    std::cout << build_plan(spec).to_text() << "\n";
    return 0;
}

struct CostArgs {
    std::string policy = "all";
    std::int64_t frames = 13;
    std::int64_t video_frames = 0;  // overrides frames when set
    std::int64_t tokens = 4084;
    std::int64_t window = 4;
    std::int64_t anchors = 4333;
    std::string keep_prob = "1";
};

void print_cost_table(const CostTable& table, const char* name) {
    std::cout << "policy,frame,attended,cumulative\n";
    for (std::size_t i = 0; i < table.per_frame.size(); ++i)
        std::cout << name << ',' << (i + 1) << ',' << to_string(table.per_frame[i])
                  << ',' << to_string(table.cumulative[i]) << "\n";
}

int run_cost(const CostArgs& args) {
    CostParams params;
    params.frames =
        args.video_frames > 0 ? latent_from_video_frames(args.video_frames) : args.frames;
    params.tokens_per_frame = args.tokens;
    params.window = args.window;
    params.anchors = args.anchors;
    params.keep_prob = parse_rational(args.keep_prob);
    params.validate();

    if (args.policy == "full" || args.policy == "all")
        print_cost_table(cost_model(PolicyKind::Full, params), "full");
    if (args.policy == "sliding" || args.policy == "all")
        print_cost_table(cost_model(PolicyKind::SlidingWindow, params), "sliding");
    if (args.policy == "packcache" || args.policy == "all")
        print_cost_table(cost_model(PolicyKind::PackCache, params), "packcache");
    if (args.policy == "all") {
        const Rational cum = cumulative_ratio(params);
        const Rational last = last_frame_ratio(params);
        std::cout << "cumulative_ratio=" << to_string(cum) << " (" << to_double(cum)
                  << ")\n";
        std::cout << "last_frame_ratio=" << to_string(last) << " (" << to_double(last)
                  << ")\n";
    } else if (args.policy != "full" && args.policy != "sliding" &&
               args.policy != "packcache") {
        throw std::invalid_argument("policy must be full, sliding, packcache, or all");
    }
    return 0;
}

struct CompareArgs {
    std::string config_path;
    std::string out_path;
};

int run_compare(const CompareArgs& args) {
    const SimConfig cfg = load_config(args.config_path);
    const std::string csv = compare_csv(cfg);
    if (args.out_path.empty())
        std::cout << csv;
    else
        write_file(args.out_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-bounded KV-cache policies on a toy frame generator"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Run the generation loop from a config");
    sim->add_option("--config", sim_args.config_path, "Config file (key=value lines)")
        ->required();
    sim->add_option("--trace", sim_args.trace_path, "Write per-frame trace CSV here");
    sim->add_option("--stats", sim_args.stats_path, "Write region-stats CSV here");
    sim->add_option("--summary", sim_args.summary_path, "Write run summary JSON here");
    sim->add_option("--stats-frame", sim_args.stats_frame,
                    "Frame index for --stats (default: last)");

    AllocArgs alloc_args;
    auto* alloc = app.add_subcommand("alloc", "Print a budget allocation plan");
    alloc->add_option("--w", alloc_args.window, "Window size")->required();
    alloc->add_option("--b-one", alloc_args.budget_total,
                      "Total history token budget (default 4084)");
    alloc->add_option("--source", alloc_args.source, "closed_form or normalized");
    alloc->add_option("--rho", alloc_args.rho, "Decay ratio for normalized plans");
    alloc->add_option("--quota-mode", alloc_args.quota_mode,
                      "none, strict, or recent_floor");
    alloc->add_option("--b-min", alloc_args.b_min, "Strict-quota minimum fraction");
    alloc->add_option("--quota-frames", alloc_args.quota_frames,
                      "Frames protected by recent_floor");

    CostArgs cost_args;
    auto* cost = app.add_subcommand("cost", "Print analytic attended-key tables");
    cost->add_option("--policy", cost_args.policy, "full, sliding, packcache, or all");
    cost->add_option("--frames", cost_args.frames, "Latent frame count");
    cost->add_option("--video-frames", cost_args.video_frames,
                     "Video frame count (multiple of 4; overrides --frames)");
    cost->add_option("--tokens", cost_args.tokens, "Tokens per frame");
    cost->add_option("--window", cost_args.window, "Window size");
    cost->add_option("--anchors", cost_args.anchors, "Anchor token count");
    cost->add_option("--keep-prob", cost_args.keep_prob, "Expected unmasked fraction");

    CompareArgs cmp_args;
    auto* cmp = app.add_subcommand("compare", "Run all three policies on one config");
    cmp->add_option("--config", cmp_args.config_path, "Config file")->required();
    cmp->add_option("--out", cmp_args.out_path, "Write comparison CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (alloc->parsed()) return run_alloc(alloc_args);
        if (cost->parsed()) return run_cost(cost_args);
        if (cmp->parsed()) return run_compare(cmp_args);
    } catch (const packcache::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
