#pragma once

#include <deque>
#include <string>
#include <vector>

#include "packcache/types.hpp"

namespace packcache {

// KV cache for frame-structured generation. Anchor tokens (text prompt
// and conditioning image) live outside the frame window and are never
// evicted or budgeted; history frames live in a deque, oldest first.
//
// Invariants (checked where they can be broken):
//   - frames().size() <= window_capacity()
//   - frame indices are strictly increasing, oldest first
//   - anchors are set at most once
class KvCache {
public:
    KvCache(std::int64_t window_capacity, std::int64_t frame_token_count,
            std::int64_t key_dim, std::int64_t value_dim);

    // Anchors may only be installed once, before any frames exist. Prompt
    // entries must be tagged text, conditioning entries cond; they are
    // stored in that order.
    void set_anchors(std::vector<CacheEntry> prompt_entries,
                     std::vector<CacheEntry> cond_entries);
    bool has_anchors() const { return anchors_set_; }

    const std::vector<CacheEntry>& anchors() const { return anchors_; }
    std::vector<CacheEntry>& anchors_mut() { return anchors_; }

    const std::deque<FrameCache>& frames() const { return frames_; }
    std::deque<FrameCache>& frames_mut() { return frames_; }

    std::int64_t window_capacity() const { return window_capacity_; }
    std::int64_t frame_token_count() const { return frame_token_count_; }
    std::int64_t key_dim() const { return key_dim_; }
    std::int64_t value_dim() const { return value_dim_; }

    // Number of whole frames evicted from the front of the window since
    // the start of generation; the temporal rebase offset.
    std::int64_t dropped_frames() const { return dropped_frames_; }
    void note_dropped(std::int64_t count);

    std::int64_t anchor_count() const { return std::int64_t(anchors_.size()); }
    std::int64_t history_token_count() const;
    std::int64_t occupancy() const { return anchor_count() + history_token_count(); }

    void reset_attn_mass();

    // One line per entry, anchors first then frames oldest-first:
    //   <region> <frame_index> <seq> <t> <h> <w> <masked> <attn_mass>
    // with attn_mass printed at full round-trip precision.
    std::string snapshot() const;

private:
    std::vector<CacheEntry> anchors_;
    std::deque<FrameCache> frames_;
    std::int64_t window_capacity_;
    std::int64_t frame_token_count_;
    std::int64_t key_dim_;
    std::int64_t value_dim_;
    std::int64_t dropped_frames_ = 0;
    bool anchors_set_ = false;
};

}  // namespace packcache
