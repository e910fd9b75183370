#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace packcache {

// Thrown when a documented cache invariant is broken. The message names
// the invariant so CLI diagnostics can surface it verbatim.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

enum class RegionTag : std::uint8_t {
    Text,     // text-prompt anchors
    Cond,     // conditioning-image anchors
    Frame,    // a generated history frame, identified by frame_index
    Current,  // the frame currently being generated (not yet in the cache)
};

// A named slice of the attention key space. Text and cond regions are
// anchors: always visible, never evicted, never counted against the
// history budget. Frame regions carry the index of the generated frame.
struct Region {
    RegionTag tag = RegionTag::Text;
    std::int64_t frame_index = -1;  // valid only for tag == Frame

    static Region text() { return {RegionTag::Text, -1}; }
    static Region cond() { return {RegionTag::Cond, -1}; }
    static Region frame(std::int64_t index) { return {RegionTag::Frame, index}; }
    static Region current() { return {RegionTag::Current, -1}; }

    bool is_anchor() const { return tag == RegionTag::Text || tag == RegionTag::Cond; }

    friend bool operator==(const Region& a, const Region& b) {
        return a.tag == b.tag && a.frame_index == b.frame_index;
    }
    friend bool operator!=(const Region& a, const Region& b) { return !(a == b); }
    friend bool operator<(const Region& a, const Region& b) {
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.frame_index < b.frame_index;
    }
};

std::string to_string(const Region& region);

// Multimodal position: temporal/height/width coordinates plus the flat
// sequence index used for 1D-rotated text tokens and for ordering.
struct Position3D {
    std::int64_t t = 0;
    std::int64_t h = 0;
    std::int64_t w = 0;
    std::int64_t seq = 0;

    friend bool operator==(const Position3D& a, const Position3D& b) {
        return a.t == b.t && a.h == b.h && a.w == b.w && a.seq == b.seq;
    }
    friend bool operator!=(const Position3D& a, const Position3D& b) { return !(a == b); }
};

// One cached key/value pair. Keys and values are stored unrotated; the
// rotary embedding is applied at attention time from `pos`, so rebasing
// a position never has to touch the stored vectors.
struct CacheEntry {
    Eigen::VectorXd key;
    Eigen::VectorXd value;
    Position3D pos;
    Region region;
    bool masked = false;      // excluded from attention and dropped at pack time
    double attn_mass = 0.0;   // accumulated attention received, pack-time salience
};

// All entries belonging to one generated frame, oldest first by
// intra-frame order. `original_token_count` remembers the size before
// any packing so occupancy accounting can report both.
struct FrameCache {
    std::int64_t frame_index = 0;
    std::vector<CacheEntry> entries;
    std::int64_t original_token_count = 0;

    std::int64_t unmasked_count() const {
        std::int64_t n = 0;
        for (const auto& e : entries)
            if (!e.masked) ++n;
        return n;
    }
};

}  // namespace packcache
