#include "packcache/types.hpp"

namespace packcache {

std::string to_string(const Region& region) {
    switch (region.tag) {
        case RegionTag::Text: return "text";
        case RegionTag::Cond: return "cond";
        case RegionTag::Frame: return "frame:" + std::to_string(region.frame_index);
        case RegionTag::Current: return "current";
    }
    throw std::invalid_argument("unknown region tag");
}

}  // namespace packcache
