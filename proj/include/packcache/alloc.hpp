#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "packcache/rational.hpp"

namespace packcache {

// Exponential retention decay g(d) = rho^d over frame age d, with d = 1
// the most recent history frame. Equivalently exp(-alpha * d) for
// alpha = -ln(rho); c records the overall scale of the fitted curve but
// never enters the allocation, which normalizes it away.
struct DecayParams {
    double rho = 0.5;
    double c = 1.0;

    double alpha() const;
    void validate() const;
};

double decay_kernel(std::int64_t age, const DecayParams& params);

// b_d = rho^d / sum_{j=1..window} rho^j. Index 0 holds d = 1 (most
// recent). The rational form is exact; the DecayParams form normalizes
// in floating point for arbitrary rho.
std::vector<Rational> normalized_allocation(std::int64_t window, const Rational& rho);
std::vector<double> normalized_allocation(std::int64_t window, const DecayParams& params);

// Half-life allocation b_d = 2^(-min(d, window-1)): each step back in
// time halves the share, and the oldest share is repeated so the total
// is exactly 1. [1], [1/2,1/2], [1/2,1/4,1/4], [1/2,1/4,1/8,1/8], ...
std::vector<Rational> closed_form_allocation(std::int64_t window);

// Raise each fraction to at least its floor, paying for the raises by
// scaling the remaining fractions down proportionally; repeated until no
// entry sits below its floor. The result sums to exactly 1. Requires the
// input to sum to 1 and the floors to sum to at most 1.
std::vector<Rational> apply_floors(std::vector<Rational> fractions,
                                   const std::vector<Rational>& floors);

// Uniform minimum share b_min per retained frame. When window * b_min
// exceeds 1 the quota cannot fit the whole window, so the oldest frames
// are truncated (FIFO) down to floor(1 / b_min) and the survivors are
// renormalized before the floor is applied.
std::vector<Rational> apply_min_quota(std::vector<Rational> fractions, const Rational& b_min);

// Minimum share 2^(-quota_frames) for the quota_frames most recent
// frames only; older frames just absorb the proportional scaling.
std::vector<Rational> apply_recent_floor(std::vector<Rational> fractions,
                                         std::int64_t quota_frames);

// Integer token budgets t_d summing exactly to budget_total: floor each
// budget_total * b_d, then hand the leftover tokens one each to the most
// recent frames whose exact share was rounded down.
std::vector<std::int64_t> token_budgets(const std::vector<Rational>& fractions,
                                        std::int64_t budget_total);

enum class PlanSource { ClosedForm, NormalizedDecay };
enum class MinQuotaMode { None, Strict, RecentFloor };

struct AllocationPlan {
    std::vector<Rational> fractions;          // index 0 = most recent frame (d = 1)
    std::vector<std::int64_t> token_budgets;  // same order, sums to budget_total
    std::int64_t budget_total = 0;
    std::int64_t effective_window = 0;  // == fractions.size() after any truncation
    Rational b_min = Rational(0);       // quota the fractions were built under

    void validate() const;

    // "W=4 b=[1/2,1/4,1/8,1/8] t=[8,4,2,2]"
    std::string to_text() const;
};

struct PlanSpec {
    std::int64_t window = 4;
    std::int64_t budget_total = 0;
    PlanSource source = PlanSource::ClosedForm;
    Rational rho = Rational(1, 2);  // NormalizedDecay only
    MinQuotaMode quota_mode = MinQuotaMode::None;
    Rational b_min = Rational(0);    // Strict only
    std::int64_t quota_frames = 3;   // RecentFloor only
};

AllocationPlan build_plan(const PlanSpec& spec);

}  // namespace packcache
