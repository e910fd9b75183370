#include "packcache/cache.hpp"

#include <cstdio>
#include <iterator>
#include <sstream>

namespace packcache {

KvCache::KvCache(std::int64_t window_capacity, std::int64_t frame_token_count,
                 std::int64_t key_dim, std::int64_t value_dim)
    : window_capacity_(window_capacity),
      frame_token_count_(frame_token_count),
      key_dim_(key_dim),
      value_dim_(value_dim) {
    if (window_capacity < 1) throw std::invalid_argument("window_capacity must be >= 1");
    if (frame_token_count < 1) throw std::invalid_argument("frame_token_count must be >= 1");
    if (key_dim < 1 || value_dim < 1) throw std::invalid_argument("key/value dims must be >= 1");
}

void KvCache::set_anchors(std::vector<CacheEntry> prompt_entries,
                          std::vector<CacheEntry> cond_entries) {
    if (anchors_set_) throw InvariantViolation("anchors-set-once: anchors already installed");
    if (!frames_.empty())
        throw InvariantViolation("anchors-before-frames: frames already present");
    for (const auto& e : prompt_entries)
        if (e.region != Region::text())
            throw std::invalid_argument("prompt entries must be tagged text");
    for (const auto& e : cond_entries)
        if (e.region != Region::cond())
            throw std::invalid_argument("conditioning entries must be tagged cond");
    anchors_ = std::move(prompt_entries);
    anchors_.insert(anchors_.end(), std::make_move_iterator(cond_entries.begin()),
                    std::make_move_iterator(cond_entries.end()));
    for (const auto& e : anchors_)
        if (e.key.size() != key_dim_ || e.value.size() != value_dim_)
            throw std::invalid_argument("anchor entry dimension mismatch");
    anchors_set_ = true;
}

void KvCache::note_dropped(std::int64_t count) {
    if (count < 0) throw std::invalid_argument("dropped count must be >= 0");
    dropped_frames_ += count;
}

std::int64_t KvCache::history_token_count() const {
    std::int64_t n = 0;
    for (const auto& f : frames_) n += std::int64_t(f.entries.size());
    return n;
}

void KvCache::reset_attn_mass() {
    for (auto& e : anchors_) e.attn_mass = 0.0;
    for (auto& f : frames_)
        for (auto& e : f.entries) e.attn_mass = 0.0;
}

namespace {

void append_line(std::ostringstream& out, const CacheEntry& e, std::int64_t frame_index) {
    char mass[64];
    std::snprintf(mass, sizeof mass, "%.17g", e.attn_mass);
    out << to_string(e.region) << ' ' << frame_index << ' ' << e.pos.seq << ' ' << e.pos.t
        << ' ' << e.pos.h << ' ' << e.pos.w << ' ' << (e.masked ? 1 : 0) << ' ' << mass
        << '\n';
}

}  // namespace

std::string KvCache::snapshot() const {
    std::ostringstream out;
    for (const auto& e : anchors_) append_line(out, e, -1);
    for (const auto& f : frames_)
        for (const auto& e : f.entries) append_line(out, e, f.frame_index);
    return out.str();
}

}  // namespace packcache
