#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ismnet {

using SimplexId = std::uint32_t;

/// Score vector over one simplex layer, with a per-entry observation mask.
struct InfluenceScores {
    std::vector<double> values;
    std::vector<std::uint8_t> observed;

    static InfluenceScores all_observed(std::vector<double> v) {
        InfluenceScores s;
        s.observed.assign(v.size(), 1);
        s.values = std::move(v);
        return s;
    }

    static InfluenceScores unobserved(std::size_t n) {
        InfluenceScores s;
        s.values.assign(n, 0.0);
        s.observed.assign(n, 0);
        return s;
    }

    std::size_t size() const noexcept { return values.size(); }
    bool is_observed(std::size_t i) const { return observed[i] != 0; }

    std::vector<SimplexId> observed_ids() const {
        std::vector<SimplexId> ids;
        for (std::size_t i = 0; i < observed.size(); ++i)
            if (observed[i]) ids.push_back(static_cast<SimplexId>(i));
        return ids;
    }
};

}  // namespace ismnet
