#include "platsim/allocation.hpp"

#include <cmath>
#include <stdexcept>

namespace platsim {

double control_ratio(const AllocationPolicy& policy, int k) {
    if (k < 1) throw std::invalid_argument("control_ratio: no active arms");
    const double kd = static_cast<double>(k);
    switch (policy.kind) {
        case AllocationKind::balanced: return 1.0 / (kd + 1.0);
        case AllocationKind::k_alloc: return 0.5;
        case AllocationKind::sqrt_k: return std::sqrt(kd) / (kd + std::sqrt(kd));
        case AllocationKind::sqrt_k_capped:
            return std::max(std::sqrt(kd) / (kd + std::sqrt(kd)), policy.cap);
    }
    throw std::invalid_argument("control_ratio: unknown policy");
}

double control_spots_x(const AllocationPolicy& policy, int k) {
    const double r = control_ratio(policy, k);
    return r * static_cast<double>(k) / (1.0 - r);
}

std::vector<int> generate_block(RngStream& rng, const std::vector<int>& active_arms, double x) {
    if (active_arms.empty()) throw std::invalid_argument("generate_block: no active arms");
    if (!(x >= 0.0)) throw std::invalid_argument("generate_block: x must be >= 0");
    const double fl = std::floor(x);
    auto n_control = static_cast<std::size_t>(fl);
    const double frac = x - fl;
    if (rng.uniform() < frac) ++n_control;
    std::vector<int> block(active_arms);
    block.insert(block.end(), n_control, kControl);
    rng.shuffle(block);
    return block;
}

int BlockRandomizer::next(RngStream& rng, const std::vector<int>& active_arms,
                          const AllocationPolicy& policy) {
    if (active_arms.empty()) throw std::invalid_argument("BlockRandomizer: no active arms");
    if (pending_.empty() || snapshot_ != active_arms) {
        snapshot_ = active_arms;
        pending_ = generate_block(rng, active_arms,
                                  control_spots_x(policy, static_cast<int>(active_arms.size())));
    }
    const int a = pending_.back();
    pending_.pop_back();
    return a;
}

int next_assignment_simple(RngStream& rng, const std::vector<int>& active_arms,
                           const AllocationPolicy& policy) {
    if (active_arms.empty()) throw std::invalid_argument("next_assignment_simple: no active arms");
    const double r = control_ratio(policy, static_cast<int>(active_arms.size()));
    if (rng.uniform() < r) return kControl;
    const auto idx = static_cast<std::size_t>(rng.uniform_below(active_arms.size()));
    return active_arms[idx];
}

}  // namespace platsim
