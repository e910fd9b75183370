#include "packcache/trace_io.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "packcache/rational.hpp"

namespace packcache {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_counts(const std::vector<std::int64_t>& counts) {
    std::string out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(counts[i]);
    }
    return out;
}

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Full: return "full";
        case PolicyKind::SlidingWindow: return "sliding";
        case PolicyKind::PackCache: return "packcache";
    }
    return "?";
}

}  // namespace

std::string trace_csv(const GenerationTrace& trace) {
    std::ostringstream out;
    out << "frame,attended_keys,occupancy,kept_per_frame,removed_masked,"
           "removed_by_budget,dropped_frames\n";
    for (const auto& f : trace.frames) {
        out << f.frame_index << ',' << f.attended_keys << ',' << f.occupancy << ','
            << join_counts(f.report.kept_per_frame) << ',' << f.report.removed_masked
            << ',' << f.report.removed_by_budget << ',' << f.dropped_frames << '\n';
    }
    return out.str();
}

std::string stats_csv(const FrameTrace& frame) {
    std::ostringstream out;
    out << "step,layer,region,mean\n";
    for (const auto& st : frame.stats)
        for (const auto& [region, mean] : st.mean_attention)
            out << st.step << ',' << st.layer << ',' << to_string(region) << ','
                << format_double(mean) << '\n';
    return out.str();
}

std::string summary_json(const SimConfig& config, const GenerationTrace& trace) {
    nlohmann::json j;
    j["config"] = {
        {"frames", config.frames},
        {"tokens_per_frame", config.tokens_per_frame},
        {"window", config.window},
        {"heads", config.heads},
        {"head_dim", config.head_dim},
        {"steps_per_frame", config.steps_per_frame},
        {"layers", config.layers},
        {"keep_prob", config.keep_prob},
        {"seed", config.seed},
        {"decay_injection", config.decay_injection},
        {"text_tokens", config.text_tokens},
        {"cond_tokens", config.cond_tokens},
        {"rng_algorithm", config.rng_algorithm},
        {"policy", policy_name(config.policy.kind)},
    };
    j["anchor_count"] = trace.anchor_count;
    j["total_attended"] = trace.total_attended;
    j["wall_ms"] = trace.wall_ms;
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : trace.frames) {
        frames.push_back({
            {"frame", f.frame_index},
            {"attended_keys", f.attended_keys},
            {"occupancy", f.occupancy},
            {"dropped_frames", f.dropped_frames},
            {"removed_masked", f.report.removed_masked},
            {"removed_by_budget", f.report.removed_by_budget},
            {"wall_ms", f.wall_ms},
        });
    }
    j["frames"] = std::move(frames);
    if (!trace.frames.empty()) {
        nlohmann::json means;
        for (const auto& [region, mean] : aggregate_region_means(trace.frames.back()))
            means[to_string(region)] = mean;
        j["last_frame_region_means"] = std::move(means);
    }
    return j.dump(2) + "\n";
}

std::string compare_csv(const SimConfig& base) {
    constexpr PolicyKind kinds[] = {PolicyKind::Full, PolicyKind::SlidingWindow,
                                    PolicyKind::PackCache};
    std::vector<GenerationTrace> traces;
    for (PolicyKind kind : kinds) {
        SimConfig cfg = base;
        cfg.policy.kind = kind;
        traces.push_back(run(cfg));
    }
    std::ostringstream out;
    out << "frame";
    for (PolicyKind kind : kinds)
        out << ',' << policy_name(kind) << "_attended," << policy_name(kind)
            << "_occupancy";
    out << '\n';
    for (std::size_t i = 0; i < traces[0].frames.size(); ++i) {
        out << traces[0].frames[i].frame_index;
        for (const auto& trace : traces)
            out << ',' << trace.frames[i].attended_keys << ','
                << trace.frames[i].occupancy;
        out << '\n';
    }
    return out.str();
}

}  // namespace packcache
