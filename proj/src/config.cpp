#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "packcache/rational.hpp"
#include "packcache/sim.hpp"

namespace packcache {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_int(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::int64_t out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(line, "expected an integer for '" + key + "', got '" + v + "'");
    }
}

double parse_double(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(line, "expected a number for '" + key + "', got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line, "expected true/false for '" + key + "', got '" + v + "'");
}

Rational parse_frac(const std::string& v, std::size_t line, const std::string& key) {
    try {
        return parse_rational(v);
    } catch (const std::exception&) {
        fail(line, "expected a rational for '" + key + "', got '" + v + "'");
    }
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, std::size_t>> kv;
    {
        std::istringstream in(text);
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string line = trim(raw);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(line_no, "expected key=value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(line_no, "empty key");
            if (value.empty()) fail(line_no, "empty value for '" + key + "'");
            if (kv.count(key)) fail(line_no, "duplicate key '" + key + "'");
            kv.emplace(key, std::make_pair(value, line_no));
        }
    }

    SimConfig cfg;
    auto take = [&](const char* key) -> const std::pair<std::string, std::size_t>* {
        const auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        return &it->second;
    };

    bool explicit_dims = kv.count("dims_t") || kv.count("dims_h") || kv.count("dims_w");
    if (const auto* p = take("head_dim")) {
        cfg.head_dim = int(parse_int(p->first, p->second, "head_dim"));
        if (!explicit_dims) cfg.rope = RopeConfig::for_head_dim(cfg.head_dim);
        cfg.rope.head_dim = cfg.head_dim;
    }

    struct Handler {
        const char* key;
        std::function<void(const std::string&, std::size_t)> apply;
    };
    const std::vector<Handler> handlers = {
        {"frames", [&](const std::string& v, std::size_t l) { cfg.frames = parse_int(v, l, "frames"); }},
        {"tokens_per_frame",
         [&](const std::string& v, std::size_t l) { cfg.tokens_per_frame = parse_int(v, l, "tokens_per_frame"); }},
        {"window", [&](const std::string& v, std::size_t l) { cfg.window = parse_int(v, l, "window"); }},
        {"heads", [&](const std::string& v, std::size_t l) { cfg.heads = int(parse_int(v, l, "heads")); }},
        {"steps_per_frame",
         [&](const std::string& v, std::size_t l) { cfg.steps_per_frame = parse_int(v, l, "steps_per_frame"); }},
        {"layers", [&](const std::string& v, std::size_t l) { cfg.layers = parse_int(v, l, "layers"); }},
        {"keep_prob", [&](const std::string& v, std::size_t l) { cfg.keep_prob = parse_double(v, l, "keep_prob"); }},
        {"seed",
         [&](const std::string& v, std::size_t l) { cfg.seed = std::uint64_t(parse_int(v, l, "seed")); }},
        {"decay_injection",
         [&](const std::string& v, std::size_t l) { cfg.decay_injection = parse_double(v, l, "decay_injection"); }},
        {"text_tokens",
         [&](const std::string& v, std::size_t l) { cfg.text_tokens = parse_int(v, l, "text_tokens"); }},
        {"cond_tokens",
         [&](const std::string& v, std::size_t l) { cfg.cond_tokens = parse_int(v, l, "cond_tokens"); }},
        {"rng_algorithm", [&](const std::string& v, std::size_t) { cfg.rng_algorithm = v; }},
        {"policy",
         [&](const std::string& v, std::size_t l) {
             if (v == "full") cfg.policy.kind = PolicyKind::Full;
             else if (v == "sliding") cfg.policy.kind = PolicyKind::SlidingWindow;
             else if (v == "packcache") cfg.policy.kind = PolicyKind::PackCache;
             else fail(l, "policy must be full, sliding, or packcache, got '" + v + "'");
         }},
        {"plan_source",
         [&](const std::string& v, std::size_t l) {
             if (v == "closed_form") cfg.policy.plan_source = PlanSource::ClosedForm;
             else if (v == "normalized") cfg.policy.plan_source = PlanSource::NormalizedDecay;
             else fail(l, "plan_source must be closed_form or normalized, got '" + v + "'");
         }},
        {"rho", [&](const std::string& v, std::size_t l) { cfg.policy.rho = parse_frac(v, l, "rho"); }},
        {"quota_mode",
         [&](const std::string& v, std::size_t l) {
             if (v == "none") cfg.policy.quota_mode = MinQuotaMode::None;
             else if (v == "strict") cfg.policy.quota_mode = MinQuotaMode::Strict;
             else if (v == "recent_floor") cfg.policy.quota_mode = MinQuotaMode::RecentFloor;
             else fail(l, "quota_mode must be none, strict, or recent_floor, got '" + v + "'");
         }},
        {"b_min", [&](const std::string& v, std::size_t l) { cfg.policy.b_min = parse_frac(v, l, "b_min"); }},
        {"quota_frames",
         [&](const std::string& v, std::size_t l) { cfg.policy.quota_frames = parse_int(v, l, "quota_frames"); }},
        {"rebase",
         [&](const std::string& v, std::size_t l) {
             if (v == "none") cfg.policy.rebase = RebaseMode::None;
             else if (v == "spatial_preserving") cfg.policy.rebase = RebaseMode::SpatialPreserving;
             else if (v == "fully_continuous") cfg.policy.rebase = RebaseMode::FullyContinuous;
             else fail(l, "rebase must be none, spatial_preserving, or fully_continuous, got '" + v + "'");
         }},
        {"cumulative_attn_mass",
         [&](const std::string& v, std::size_t l) { cfg.policy.cumulative_attn_mass = parse_bool(v, l, "cumulative_attn_mass"); }},
        {"one_d_for_text",
         [&](const std::string& v, std::size_t l) { cfg.rope.one_d_for_text = parse_bool(v, l, "one_d_for_text"); }},
        {"dims_t", [&](const std::string& v, std::size_t l) { cfg.rope.dims_t = int(parse_int(v, l, "dims_t")); }},
        {"dims_h", [&](const std::string& v, std::size_t l) { cfg.rope.dims_h = int(parse_int(v, l, "dims_h")); }},
        {"dims_w", [&](const std::string& v, std::size_t l) { cfg.rope.dims_w = int(parse_int(v, l, "dims_w")); }},
        {"scale_t", [&](const std::string& v, std::size_t l) { cfg.rope.scale_t = int(parse_int(v, l, "scale_t")); }},
        {"scale_h", [&](const std::string& v, std::size_t l) { cfg.rope.scale_h = int(parse_int(v, l, "scale_h")); }},
        {"scale_w", [&](const std::string& v, std::size_t l) { cfg.rope.scale_w = int(parse_int(v, l, "scale_w")); }},
        {"theta_base",
         [&](const std::string& v, std::size_t l) { cfg.rope.theta_base = parse_double(v, l, "theta_base"); }},
    };

    for (const auto& h : handlers) {
        const auto it = kv.find(h.key);
        if (it == kv.end()) continue;
        h.apply(it->second.first, it->second.second);
        kv.erase(it);
    }
    kv.erase("head_dim");
    if (!kv.empty()) {
        const auto& [key, slot] = *kv.begin();
        fail(slot.second, "unknown key '" + key + "'");
    }

    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace packcache
