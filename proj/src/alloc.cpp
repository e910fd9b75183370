#include "packcache/alloc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "packcache/types.hpp"

namespace packcache {

double DecayParams::alpha() const { return -std::log(rho); }

void DecayParams::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
    if (!(c > 0.0)) throw std::invalid_argument("c must be > 0");
}

double decay_kernel(std::int64_t age, const DecayParams& params) {
    params.validate();
    if (age < 1) throw std::invalid_argument("age must be >= 1");
    return std::pow(params.rho, double(age));
}

namespace {

Rational rational_pow(const Rational& base, std::int64_t exp) {
    Rational out(1);
    for (std::int64_t i = 0; i < exp; ++i) out *= base;
    return out;
}

Rational checked_sum(const std::vector<Rational>& fractions) {
    Rational total(0);
    for (const auto& v : fractions) {
        if (v < 0) throw std::invalid_argument("fractions must be non-negative");
        total += v;
    }
    return total;
}

}  // namespace

std::vector<Rational> normalized_allocation(std::int64_t window, const Rational& rho) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must be in (0, 1)");
    std::vector<Rational> g(static_cast<std::size_t>(window));
    Rational total(0);
    for (std::int64_t d = 1; d <= window; ++d) {
        g[std::size_t(d - 1)] = rational_pow(rho, d);
        total += g[std::size_t(d - 1)];
    }
    for (auto& v : g) v /= total;
    return g;
}

std::vector<double> normalized_allocation(std::int64_t window, const DecayParams& params) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    params.validate();
    std::vector<double> g(static_cast<std::size_t>(window));
    double total = 0.0;
    for (std::int64_t d = 1; d <= window; ++d) {
        g[std::size_t(d - 1)] = decay_kernel(d, params);
        total += g[std::size_t(d - 1)];
    }
    for (auto& v : g) v /= total;
    return g;
}

std::vector<Rational> closed_form_allocation(std::int64_t window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    std::vector<Rational> b(static_cast<std::size_t>(window));
    for (std::int64_t d = 1; d <= window; ++d)
        b[std::size_t(d - 1)] = rational_pow(Rational(1, 2), std::min(d, window - 1));
    return b;
}

std::vector<Rational> apply_floors(std::vector<Rational> fractions,
                                   const std::vector<Rational>& floors) {
    const std::size_t n = fractions.size();
    if (floors.size() != n) throw std::invalid_argument("fractions/floors size mismatch");
    if (checked_sum(fractions) != 1) throw std::invalid_argument("fractions must sum to 1");
    Rational floor_sum(0);
    for (const auto& v : floors) {
        if (v < 0) throw std::invalid_argument("floors must be non-negative");
        floor_sum += v;
    }
    if (floor_sum > 1) throw std::invalid_argument("floors sum above 1: quota infeasible");

    // Pin entries that would land below their floor, rescale the rest into
    // the remaining mass, and repeat; each pass pins at least one entry or
    // converges, so this ends after at most n passes.
    std::vector<bool> pinned(n, false);
    for (;;) {
        Rational remaining(1);
        Rational unpinned_sum(0);
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i])
                remaining -= floors[i];
            else
                unpinned_sum += fractions[i];
        }
        if (unpinned_sum == 0) {
            if (remaining != 0)
                throw InvariantViolation(
                    "floor-renormalization: residual mass with no entries to absorb it");
            break;
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) continue;
            if (fractions[i] * remaining < floors[i] * unpinned_sum) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed) {
            for (std::size_t i = 0; i < n; ++i)
                if (!pinned[i]) fractions[i] = fractions[i] * remaining / unpinned_sum;
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (pinned[i]) fractions[i] = floors[i];
    return fractions;
}

std::vector<Rational> apply_min_quota(std::vector<Rational> fractions, const Rational& b_min) {
    if (b_min < 0 || b_min > 1) throw std::invalid_argument("b_min must be in [0, 1]");
    if (checked_sum(fractions) != 1) throw std::invalid_argument("fractions must sum to 1");
    if (b_min == 0) return fractions;
    if (Rational(std::int64_t(fractions.size())) * b_min > 1) {
        const std::int64_t fit = floor_to_i64(Rational(1) / b_min);
        fractions.resize(std::size_t(fit));
        Rational kept = checked_sum(fractions);
        if (kept == 0)
            throw std::invalid_argument("truncated fractions carry no mass to renormalize");
        for (auto& v : fractions) v /= kept;
    }
    const std::size_t n = fractions.size();
    return apply_floors(std::move(fractions), std::vector<Rational>(n, b_min));
}

std::vector<Rational> apply_recent_floor(std::vector<Rational> fractions,
                                         std::int64_t quota_frames) {
    if (quota_frames < 0) throw std::invalid_argument("quota_frames must be >= 0");
    const std::size_t n = fractions.size();
    std::vector<Rational> floors(n, Rational(0));
    if (quota_frames > 0) {
        const Rational floor_value = rational_pow(Rational(1, 2), quota_frames);
        for (std::size_t i = 0; i < n && i < std::size_t(quota_frames); ++i)
            floors[i] = floor_value;
    }
    return apply_floors(std::move(fractions), floors);
}

std::vector<std::int64_t> token_budgets(const std::vector<Rational>& fractions,
                                        std::int64_t budget_total) {
    if (budget_total < 0) throw std::invalid_argument("budget_total must be >= 0");
    if (checked_sum(fractions) != 1) throw std::invalid_argument("fractions must sum to 1");
    std::vector<std::int64_t> out(fractions.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        out[i] = floor_to_i64(Rational(budget_total) * fractions[i]);
        assigned += out[i];
    }
    // The leftover is the sum of the discarded fractional parts, so it is
    // always covered by handing one extra token to each rounded-down entry,
    // most recent first.
    std::int64_t leftover = budget_total - assigned;
    for (std::size_t i = 0; i < fractions.size() && leftover > 0; ++i) {
        if (Rational(budget_total) * fractions[i] != Rational(out[i])) {
            ++out[i];
            --leftover;
        }
    }
    if (leftover != 0)
        throw InvariantViolation("budget-conservation: rounding left tokens unassigned");
    return out;
}

void AllocationPlan::validate() const {
    if (fractions.size() != token_budgets.size())
        throw InvariantViolation("plan-shape: fractions and budgets must have equal length");
    if (effective_window != std::int64_t(fractions.size()))
        throw InvariantViolation("plan-shape: effective_window must match fraction count");
    Rational fsum(0);
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (fractions[i] < 0) throw InvariantViolation("plan-fractions: negative share");
        if (i > 0 && fractions[i] > fractions[i - 1])
            throw InvariantViolation("plan-fractions: shares must be non-increasing in age");
        fsum += fractions[i];
    }
    if (fsum != 1) throw InvariantViolation("plan-fractions: shares must sum to exactly 1");
    std::int64_t bsum = 0;
    for (std::size_t i = 0; i < token_budgets.size(); ++i) {
        if (token_budgets[i] < 0) throw InvariantViolation("plan-budgets: negative budget");
        if (i > 0 && token_budgets[i] > token_budgets[i - 1])
            throw InvariantViolation("plan-budgets: budgets must be non-increasing in age");
        bsum += token_budgets[i];
    }
    if (bsum != budget_total)
        throw InvariantViolation("budget-conservation: budgets must sum to the total");
}

std::string AllocationPlan::to_text() const {
    std::ostringstream out;
    out << "W=" << effective_window << " b=" << to_string(fractions) << " t=[";
    for (std::size_t i = 0; i < token_budgets.size(); ++i) {
        if (i) out << ',';
        out << token_budgets[i];
    }
    out << ']';
    return out.str();
}

AllocationPlan build_plan(const PlanSpec& spec) {
    if (spec.window < 1) throw std::invalid_argument("window must be >= 1");
    if (spec.budget_total < 0) throw std::invalid_argument("budget_total must be >= 0");
    std::vector<Rational> fractions = spec.source == PlanSource::ClosedForm
                                          ? closed_form_allocation(spec.window)
                                          : normalized_allocation(spec.window, spec.rho);
    switch (spec.quota_mode) {
        case MinQuotaMode::None:
            break;
        case MinQuotaMode::Strict:
            fractions = apply_min_quota(std::move(fractions), spec.b_min);
            break;
        case MinQuotaMode::RecentFloor:
            fractions = apply_recent_floor(std::move(fractions), spec.quota_frames);
            break;
    }
    AllocationPlan plan;
    plan.token_budgets = token_budgets(fractions, spec.budget_total);
    plan.fractions = std::move(fractions);
    plan.budget_total = spec.budget_total;
    plan.effective_window = std::int64_t(plan.fractions.size());
    plan.b_min = spec.quota_mode == MinQuotaMode::Strict ? spec.b_min : Rational(0);
    plan.validate();
    return plan;
}

}  // namespace packcache
