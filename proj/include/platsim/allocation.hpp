#pragma once

#include <vector>

#include "platsim/model.hpp"
#include "platsim/rng.hpp"

namespace platsim {

/// Control assignment marker inside blocks and assignment streams.
inline constexpr int kControl = -1;

/// Target control fraction r for k active arms. Treatment arms each get (1-r)/k.
double control_ratio(const AllocationPolicy& policy, int k);

/// Control spots x per k treatment spots: x = r*k/(1-r).
double control_spots_x(const AllocationPolicy& policy, int k);

/// Minimal permuted block: each active arm once, floor(x) control spots, plus one
/// extra control spot with probability Frac(x). Returns a uniformly shuffled block.
std::vector<int> generate_block(RngStream& rng, const std::vector<int>& active_arms, double x);

/// Block randomizer that regenerates whenever the active arm set changes or the
/// pending block is exhausted; partial blocks are discarded on set change.
class BlockRandomizer {
public:
    /// Next assignment for the given active set (ascending arm ids expected).
    int next(RngStream& rng, const std::vector<int>& active_arms, const AllocationPolicy& policy);

    /// Drop any pending spots (e.g., after an arm exits mid-week).
    void invalidate() { pending_.clear(); snapshot_.clear(); }

private:
    std::vector<int> snapshot_;
    std::vector<int> pending_;
};

/// Simple randomization: control with probability r, else uniform over active arms.
int next_assignment_simple(RngStream& rng, const std::vector<int>& active_arms,
                           const AllocationPolicy& policy);

}  // namespace platsim
