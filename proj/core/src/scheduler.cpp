#include "evsched/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>

#include "evsched/errors.hpp"
#include "evsched/rng.hpp"
#include "evsched/simplex.hpp"

namespace evsched {

namespace {

constexpr double kTol = 1e-9;

// Price ties are broken by a per-EV hash of the slot rather than the raw
// slot index; otherwise every EV facing the same flat price stretch would
// pick the same slots and the community total would spike there. The key
// is deterministic, and the exact solver and the brute-force oracle share
// it through greedy_fill.
std::uint64_t tie_key(int ev_id, int slot) {
  return mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(ev_id)) << 32) |
               static_cast<std::uint32_t>(slot));
}

// Canonical fill order: ascending (price, tie_key, slot).
std::vector<int> price_sorted(const SchedulingProblem& p, const std::vector<int>& slots) {
  std::vector<int> order(slots.begin(), slots.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double fa = p.price_cents_per_kwh[static_cast<size_t>(a)];
    double fb = p.price_cents_per_kwh[static_cast<size_t>(b)];
    if (fa != fb) return fa < fb;
    const std::uint64_t ka = tie_key(p.mask.ev_id, a);
    const std::uint64_t kb = tie_key(p.mask.ev_id, b);
    if (ka != kb) return ka < kb;
    return a < b;
  });
  return order;
}

bool switching_ok(const std::vector<int>& on_slots_sorted, int min_off) {
  for (size_t i = 1; i < on_slots_sorted.size(); ++i) {
    int gap = on_slots_sorted[i] - on_slots_sorted[i - 1] - 1;
    if (gap >= 1 && gap <= min_off) return false;
  }
  return true;
}

ChargeSchedule empty_schedule(const SchedulingProblem& p) {
  ChargeSchedule cs;
  cs.ev_id = p.mask.ev_id;
  cs.power_kw.assign(static_cast<size_t>(p.grid.slots), 0.0);
  cs.status.assign(static_cast<size_t>(p.grid.slots), 0);
  cs.cost_cents = 0.0;
  cs.optimal = true;
  cs.gap = 0.0;
  return cs;
}

ChargeSchedule schedule_from_fill(const SchedulingProblem& p, const std::vector<int>& on_slots,
                                  FillResult fill) {
  ChargeSchedule cs = empty_schedule(p);
  cs.power_kw = std::move(fill.power_kw);
  for (int t : on_slots) cs.status[static_cast<size_t>(t)] = 1;
  cs.cost_cents = fill.cost_cents;
  return cs;
}

// Bounds on the number of on slots implied by the energy target.
struct CountBounds {
  int lo = 0;
  int hi = 0;
};

CountBounds count_bounds(const SchedulingProblem& p) {
  const double w = p.e_required_kwh / p.grid.slot_hours;  // summed kW
  CountBounds cb;
  cb.lo = std::max(1, static_cast<int>(std::ceil(w / p.p_max_kw - kTol)));
  cb.hi = static_cast<int>(std::floor(w / p.p_min_kw + kTol));
  cb.hi = std::min(cb.hi, static_cast<int>(p.mask.slots.size()));
  return cb;
}

}  // namespace

int off_slots_from_minutes(const TimeGrid& grid, double minutes) {
  if (minutes < 0.0) throw ParameterError("t_off_on must be >= 0");
  const double slots = minutes / grid.slot_minutes();
  const double rounded = std::round(slots);
  if (std::abs(slots - rounded) > 1e-9)
    throw ParameterError("t_off_on must be an integer multiple of the slot duration");
  return static_cast<int>(rounded);
}

SchedulingProblem SchedulingProblem::for_ev(const EvProfile& ev, const PriceCurve& prices,
                                            AvailabilityMask mask, int t_off_on_minutes) {
  SchedulingProblem p;
  p.grid = prices.grid;
  p.price_cents_per_kwh = prices.cents_per_kwh;
  p.mask = std::move(mask);
  p.e_required_kwh = ev.daily_energy_kwh;
  p.p_min_kw = ev.p_min_kw;
  p.p_max_kw = ev.p_max_kw;
  p.min_off_slots = off_slots_from_minutes(prices.grid, t_off_on_minutes);
  return p;
}

void validate_problem(const SchedulingProblem& p) {
  validate_grid(p.grid);
  if (static_cast<int>(p.price_cents_per_kwh.size()) != p.grid.slots)
    throw ParameterError("problem: price vector length does not match grid");
  for (double f : p.price_cents_per_kwh)
    if (!std::isfinite(f)) throw ParameterError("problem: non-finite price");
  if (!(p.p_min_kw > 0.0) || p.p_min_kw > p.p_max_kw)
    throw ParameterError("problem: requires 0 < p_min <= p_max");
  if (p.min_off_slots < 0) throw ParameterError("problem: min_off_slots must be >= 0");
  if (!std::isfinite(p.e_required_kwh) || p.e_required_kwh < 0.0)
    throw ParameterError("problem: e_required must be finite and >= 0");
  int prev = -1;
  for (int t : p.mask.slots) {
    if (t < 0 || t >= p.grid.slots) throw ParameterError("problem: mask slot out of range");
    if (t <= prev) throw ParameterError("problem: mask slots must be sorted and unique");
    prev = t;
  }
}

std::optional<FillResult> greedy_fill(const SchedulingProblem& p,
                                      const std::vector<int>& on_slots) {
  const double dt = p.grid.slot_hours;
  const double w = p.e_required_kwh / dt;
  const int n = static_cast<int>(on_slots.size());
  FillResult fill;
  fill.power_kw.assign(static_cast<size_t>(p.grid.slots), 0.0);
  if (n == 0) {
    if (p.e_required_kwh > kTol) return std::nullopt;
    return fill;
  }
  if (w < n * p.p_min_kw - kTol || w > n * p.p_max_kw + kTol) return std::nullopt;

  const std::vector<int> order = price_sorted(p, on_slots);
  for (int t : order) fill.power_kw[static_cast<size_t>(t)] = p.p_min_kw;
  double rem = w - n * p.p_min_kw;
  if (rem < 0.0) rem = 0.0;
  const double headroom = p.p_max_kw - p.p_min_kw;
  for (int t : order) {
    if (rem <= 0.0) break;
    const double add = std::min(headroom, rem);
    fill.power_kw[static_cast<size_t>(t)] += add;
    rem -= add;
  }
  fill.cost_cents = 0.0;
  for (int t : order)
    fill.cost_cents +=
        fill.power_kw[static_cast<size_t>(t)] * dt * p.price_cents_per_kwh[static_cast<size_t>(t)];
  return fill;
}

int max_on_slots(const SchedulingProblem& p) {
  const int s = p.grid.slots;
  const int g = p.min_off_slots;
  std::vector<char> in_mask(static_cast<size_t>(s), 0);
  for (int t : p.mask.slots) in_mask[static_cast<size_t>(t)] = 1;
  std::vector<int> ending(static_cast<size_t>(s), 0);   // best count with last on slot == t
  std::vector<int> best_upto(static_cast<size_t>(s), 0);  // max of ending[0..t]
  int best = 0;
  for (int t = 0; t < s; ++t) {
    if (in_mask[static_cast<size_t>(t)]) {
      int v = 1;
      if (t >= 1 && in_mask[static_cast<size_t>(t - 1)])
        v = std::max(v, ending[static_cast<size_t>(t - 1)] + 1);
      const int prev_run_end = t - g - 2;
      if (prev_run_end >= 0) v = std::max(v, best_upto[static_cast<size_t>(prev_run_end)] + 1);
      ending[static_cast<size_t>(t)] = v;
      best = std::max(best, v);
    }
    best_upto[static_cast<size_t>(t)] =
        t == 0 ? ending[0] : std::max(best_upto[static_cast<size_t>(t - 1)],
                                      ending[static_cast<size_t>(t)]);
  }
  return best;
}

double max_deliverable_kwh(const SchedulingProblem& p) {
  return max_on_slots(p) * p.p_max_kw * p.grid.slot_hours;
}

bool problem_is_feasible(const SchedulingProblem& p) {
  if (p.e_required_kwh <= kTol) return true;
  const double w = p.e_required_kwh / p.grid.slot_hours;
  const CountBounds cb = count_bounds(p);
  if (cb.lo > max_on_slots(p)) return false;
  return cb.lo * p.p_min_kw <= w + kTol;
}

ChargeSchedule brute_force_schedule(const SchedulingProblem& p) {
  validate_problem(p);
  const int k = static_cast<int>(p.mask.slots.size());
  if (k > 20) throw ParameterError("brute_force_schedule: mask larger than 20 slots");
  if (p.e_required_kwh <= kTol) return empty_schedule(p);

  const CountBounds cb = count_bounds(p);
  std::optional<ChargeSchedule> best;
  std::vector<int> on;
  on.reserve(static_cast<size_t>(k));
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    const int n = std::popcount(bits);
    if (n < cb.lo || n > cb.hi) continue;
    on.clear();
    for (int i = 0; i < k; ++i)
      if (bits & (1u << i)) on.push_back(p.mask.slots[static_cast<size_t>(i)]);
    if (!switching_ok(on, p.min_off_slots)) continue;
    auto fill = greedy_fill(p, on);
    if (!fill) continue;
    if (!best || fill->cost_cents < best->cost_cents)
      best = schedule_from_fill(p, on, std::move(*fill));
  }
  if (!best)
    throw InfeasibleError("brute_force_schedule: no feasible on/off pattern for ev " +
                              std::to_string(p.mask.ev_id),
                          max_deliverable_kwh(p));
  return *best;
}

namespace {

// ---------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------

enum : std::int8_t { kFree = -1, kOff = 0, kOn = 1 };

struct BnbContext {
  const SchedulingProblem& p;
  std::vector<int> mask_index_of;  // slot -> mask index, -1 outside
  std::vector<int> price_order;    // mask indices in (price, slot) order
  double w = 0.0;                  // required energy in summed kW
  int count_lo = 0;  // minimum on-slot count any schedule needs
  int count_hi = 0;  // maximum on-slot count the energy supports
  // Cut pool shared down the tree: a row found violated once is almost
  // always needed again, so every node's LP starts from the accumulated
  // set instead of rediscovering it round by round.
  std::vector<char> pooled_link;                   // per mask index
  std::vector<std::pair<int, int>> pooled_switch;  // (mask index, k offset)
  std::vector<char> pooled_switch_seen;            // dedup, size K * min_off
};

// The switching inequality Y[t-1] - Y[t] + Y[t+k] <= 1 is the clause
// "not (on, off, on)". Unit propagation over all (t, k) pairs fixes the
// forced variables and detects constant conflicts before any LP is built.
// Returns false when the partial assignment is already infeasible.
bool propagate_switching(const BnbContext& ctx, std::vector<std::int8_t>& fixed) {
  const auto& p = ctx.p;
  const int s = p.grid.slots;
  auto value = [&](int slot) -> std::int8_t {  // 0, 1, or kFree; outside mask = 0
    if (slot < 0 || slot >= s) return 0;
    const int idx = ctx.mask_index_of[static_cast<size_t>(slot)];
    if (idx < 0) return 0;
    return fixed[static_cast<size_t>(idx)];
  };
  auto fix = [&](int slot, std::int8_t v, bool& changed) -> bool {
    const int idx = ctx.mask_index_of[static_cast<size_t>(slot)];
    const std::int8_t cur = fixed[static_cast<size_t>(idx)];
    if (cur == v) return true;
    if (cur != kFree) return false;  // conflict
    fixed[static_cast<size_t>(idx)] = v;
    changed = true;
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < static_cast<int>(fixed.size()); ++i) {
      if (fixed[static_cast<size_t>(i)] == kOff) continue;
      const int t = p.mask.slots[static_cast<size_t>(i)] + 1;
      if (t > s - 1) continue;
      const std::int8_t va = fixed[static_cast<size_t>(i)];  // Y[t-1]
      const std::int8_t vb = value(t);
      for (int kk = 1; kk <= p.min_off_slots && t + kk <= s - 1; ++kk) {
        const std::int8_t vc = value(t + kk);
        if (va == 1 && vb == 0 && vc == 1) return false;
        if (va == 1 && vc == 1 && vb == kFree) {
          if (!fix(t, kOn, changed)) return false;
        } else if (va == 1 && vb == 0 && vc == kFree) {
          if (!fix(t + kk, kOff, changed)) return false;
        } else if (vb == 0 && vc == 1 && va == kFree) {
          if (!fix(p.mask.slots[static_cast<size_t>(i)], kOff, changed)) return false;
        }
      }
    }
  }
  return true;
}

// Optimal value of the node relaxation that keeps only the energy row:
// fixed-on slots in [p_min, p_max], free slots in [0, p_max]. Cheap and
// valid, so it screens most nodes before any LP is built.
std::optional<double> box_bound(const BnbContext& ctx, const std::vector<std::int8_t>& fixed) {
  const auto& p = ctx.p;
  const double dt = p.grid.slot_hours;
  double base = 0.0, cap = 0.0, cost = 0.0;
  for (int i = 0; i < static_cast<int>(fixed.size()); ++i) {
    if (fixed[static_cast<size_t>(i)] == kOn) {
      base += p.p_min_kw;
      cap += p.p_max_kw;
    } else if (fixed[static_cast<size_t>(i)] == kFree) {
      cap += p.p_max_kw;
    }
  }
  if (base > ctx.w + kTol || cap < ctx.w - kTol) return std::nullopt;
  double rem = ctx.w - base;
  if (rem < 0.0) rem = 0.0;
  for (int i : ctx.price_order) {
    const std::int8_t st = fixed[static_cast<size_t>(i)];
    const int slot = p.mask.slots[static_cast<size_t>(i)];
    const double f = p.price_cents_per_kwh[static_cast<size_t>(slot)];
    if (st == kOn) cost += p.p_min_kw * dt * f;
  }
  for (int i : ctx.price_order) {
    if (rem <= 0.0) break;
    const std::int8_t st = fixed[static_cast<size_t>(i)];
    if (st == kOff) continue;
    const int slot = p.mask.slots[static_cast<size_t>(i)];
    const double f = p.price_cents_per_kwh[static_cast<size_t>(slot)];
    const double room = st == kOn ? p.p_max_kw - p.p_min_kw : p.p_max_kw;
    const double add = std::min(room, rem);
    cost += add * dt * f;
    rem -= add;
  }
  if (rem > kTol) return std::nullopt;
  return cost;
}

struct NodeLp {
  lp::Problem lp;
  std::vector<int> y_var;    // per mask index, -1 when fixed or off
  std::vector<int> z_var;    // per mask index, -1 when off
  double objective_const = 0.0;  // cost contributed by fixed-on p_min floors
};

// Relaxation of the node in substituted variables: P = p_min*Y + h*Z with
// h = p_max - p_min, 0 <= Z <= Y, Y in [0, 1]. This is the same polytope
// as P in [p_min*Y, p_max*Y] but needs one row per free slot instead of
// two, and fixed-on slots keep only their Z variable. After propagation
// every row starts feasible with nonbasic variables at zero, so the lone
// artificial the simplex needs is for the energy equality.
NodeLp build_node_lp(const BnbContext& ctx, const std::vector<std::int8_t>& fixed) {
  const auto& p = ctx.p;
  const double dt = p.grid.slot_hours;
  const double h = p.p_max_kw - p.p_min_kw;
  const int s = p.grid.slots;
  const int k = static_cast<int>(p.mask.slots.size());
  NodeLp node;
  node.y_var.assign(static_cast<size_t>(k), -1);
  node.z_var.assign(static_cast<size_t>(k), -1);

  double energy_rhs = ctx.w;
  int fixed_on = 0;
  std::vector<std::pair<int, double>> energy_terms;
  std::vector<std::pair<int, double>> count_terms;
  for (int i = 0; i < k; ++i) {
    const std::int8_t st = fixed[static_cast<size_t>(i)];
    if (st == kOff) continue;
    const int slot = p.mask.slots[static_cast<size_t>(i)];
    const double f = p.price_cents_per_kwh[static_cast<size_t>(slot)];
    if (h > 0.0) {
      node.z_var[static_cast<size_t>(i)] = node.lp.add_var(f * dt * h, 0.0, 1.0);
      energy_terms.emplace_back(node.z_var[static_cast<size_t>(i)], h);
    }
    if (st == kFree) {
      node.y_var[static_cast<size_t>(i)] = node.lp.add_var(f * dt * p.p_min_kw, 0.0, 1.0);
      energy_terms.emplace_back(node.y_var[static_cast<size_t>(i)], p.p_min_kw);
      count_terms.emplace_back(node.y_var[static_cast<size_t>(i)], 1.0);
    } else {  // fixed on: Y = 1 folded into constants
      node.objective_const += f * dt * p.p_min_kw;
      energy_rhs -= p.p_min_kw;
      ++fixed_on;
    }
  }
  node.lp.add_row(lp::Sense::eq, energy_rhs, std::move(energy_terms));
  // rounding cuts on the on-slot count: every integral solution turns on
  // at least ceil(W / p_max) and at most floor(W / p_min) slots; they pin
  // the p_min floor cost the plain relaxation dodges with fractional Y.
  if (!count_terms.empty()) {
    if (ctx.count_lo - fixed_on > 0)
      node.lp.add_row(lp::Sense::ge, static_cast<double>(ctx.count_lo - fixed_on), count_terms);
    node.lp.add_row(lp::Sense::le, static_cast<double>(ctx.count_hi - fixed_on),
                    std::move(count_terms));
  }

  // (variable index or -1, constant) for the Y of an absolute slot
  auto y_at = [&](int slot) -> std::pair<int, double> {
    if (slot < 0 || slot >= s) return {-1, 0.0};
    const int idx = ctx.mask_index_of[static_cast<size_t>(slot)];
    if (idx < 0) return {-1, 0.0};
    const std::int8_t st = fixed[static_cast<size_t>(idx)];
    if (st == kOff) return {-1, 0.0};
    if (st == kOn) return {-1, 1.0};
    return {node.y_var[static_cast<size_t>(idx)], 0.0};
  };

  for (int i = 0; i < k; ++i) {
    if (!ctx.pooled_link[static_cast<size_t>(i)]) continue;
    const int zv = node.z_var[static_cast<size_t>(i)];
    const int yv = node.y_var[static_cast<size_t>(i)];
    if (zv >= 0 && yv >= 0) node.lp.add_row(lp::Sense::le, 0.0, {{zv, 1.0}, {yv, -1.0}});
  }
  for (const auto& [i, kk] : ctx.pooled_switch) {
    if (fixed[static_cast<size_t>(i)] == kOff) continue;
    const int t = p.mask.slots[static_cast<size_t>(i)] + 1;
    if (t + kk > s - 1) continue;
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;
    int positive = 0;
    auto push = [&](int slot, double sign) {
      auto [var, cst] = y_at(slot);
      if (var < 0) {
        constant += sign * cst;
      } else {
        terms.emplace_back(var, sign);
        if (sign > 0.0) ++positive;
      }
    };
    push(t - 1, 1.0);
    push(t, -1.0);
    push(t + kk, 1.0);
    const double rhs = 1.0 - constant;  // propagation guarantees rhs >= 0 for live rows
    if (terms.empty()) continue;
    if (static_cast<double>(positive) <= rhs + 1e-12) continue;  // vacuous under this fixing
    node.lp.add_row(lp::Sense::le, rhs, std::move(terms));
  }
  return node;
}

// Solves the node relaxation with the switching inequalities generated
// lazily: most are slack at the optimum, so starting from the energy and
// link rows and adding only violated inequalities converges to the same
// optimum as the full row set in a couple of rounds, on a much smaller
// tableau.
lp::Solution solve_node_relaxation(BnbContext& ctx, const std::vector<std::int8_t>& fixed,
                                   NodeLp& node) {
  const auto& p = ctx.p;
  const int s = p.grid.slots;
  const int k = static_cast<int>(p.mask.slots.size());

  // (variable index or -1, constant) for the Y of an absolute slot
  auto y_at = [&](int slot) -> std::pair<int, double> {
    if (slot < 0 || slot >= s) return {-1, 0.0};
    const int idx = ctx.mask_index_of[static_cast<size_t>(slot)];
    if (idx < 0) return {-1, 0.0};
    const std::int8_t st = fixed[static_cast<size_t>(idx)];
    if (st == kOff) return {-1, 0.0};
    if (st == kOn) return {-1, 1.0};
    return {node.y_var[static_cast<size_t>(idx)], 0.0};
  };

  lp::Solution sol;
  for (int round = 0; round < 64; ++round) {
    sol = lp::solve(node.lp);
    if (sol.status != lp::Status::optimal) return sol;
    auto y_value = [&](int slot) {
      const auto [var, cst] = y_at(slot);
      return var < 0 ? cst : sol.x[static_cast<size_t>(var)];
    };
    int added = 0;
    // semi-continuity links Z <= Y, generated only when violated
    for (int i = 0; i < k; ++i) {
      const int zv = node.z_var[static_cast<size_t>(i)];
      const int yv = node.y_var[static_cast<size_t>(i)];
      if (zv < 0 || yv < 0) continue;
      if (sol.x[static_cast<size_t>(zv)] > sol.x[static_cast<size_t>(yv)] + 1e-9) {
        node.lp.add_row(lp::Sense::le, 0.0, {{zv, 1.0}, {yv, -1.0}});
        ctx.pooled_link[static_cast<size_t>(i)] = 1;
        ++added;
      }
    }
    for (int i = 0; i < k; ++i) {
      if (fixed[static_cast<size_t>(i)] == kOff) continue;
      const int t = p.mask.slots[static_cast<size_t>(i)] + 1;
      if (t > s - 1) continue;
      const double ya = y_value(t - 1);
      const double yb = y_value(t);
      for (int kk = 1; kk <= p.min_off_slots && t + kk <= s - 1; ++kk) {
        if (ya - yb + y_value(t + kk) <= 1.0 + 1e-9) continue;
        double constant = 0.0;
        std::vector<std::pair<int, double>> terms;
        auto push = [&](int slot, double sign) {
          auto [var, cst] = y_at(slot);
          if (var < 0)
            constant += sign * cst;
          else
            terms.emplace_back(var, sign);
        };
        push(t - 1, 1.0);
        push(t, -1.0);
        push(t + kk, 1.0);
        node.lp.add_row(lp::Sense::le, 1.0 - constant, std::move(terms));
        const size_t seen = static_cast<size_t>(i) * static_cast<size_t>(p.min_off_slots) +
                            static_cast<size_t>(kk - 1);
        if (!ctx.pooled_switch_seen[seen]) {
          ctx.pooled_switch_seen[seen] = 1;
          ctx.pooled_switch.emplace_back(i, kk);
        }
        ++added;
      }
    }
    if (added == 0) return sol;
  }
  sol.status = lp::Status::iteration_limit;
  return sol;
}

// Feasible on-set built by scanning slots in price order and keeping each
// slot that does not break the switching rule against what is already
// chosen; used to seed the incumbent.
// Exhausts a subtree with few free variables by direct enumeration with
// box-bound pruning; cheaper than LP nodes at that size.
void enumerate_small_subtree(const BnbContext& ctx, std::vector<std::int8_t>& fixed,
                             const std::vector<int>& free_idx, size_t pos,
                             std::optional<ChargeSchedule>& incumbent) {
  const auto& p = ctx.p;
  const auto box = box_bound(ctx, fixed);
  if (!box) return;
  if (incumbent && *box >= incumbent->cost_cents) return;
  if (pos == free_idx.size()) {
    std::vector<int> on;
    for (size_t i = 0; i < fixed.size(); ++i)
      if (fixed[i] == kOn) on.push_back(p.mask.slots[i]);
    if (!switching_ok(on, p.min_off_slots)) return;
    auto fill = greedy_fill(p, on);
    if (fill && (!incumbent || fill->cost_cents < incumbent->cost_cents))
      incumbent = schedule_from_fill(p, on, std::move(*fill));
    return;
  }
  const size_t v = static_cast<size_t>(free_idx[pos]);
  fixed[v] = kOn;
  enumerate_small_subtree(ctx, fixed, free_idx, pos + 1, incumbent);
  fixed[v] = kOff;
  enumerate_small_subtree(ctx, fixed, free_idx, pos + 1, incumbent);
  fixed[v] = kFree;
}

std::optional<std::vector<int>> greedy_feasible_set(const BnbContext& ctx, int n) {
  const auto& p = ctx.p;
  std::vector<int> chosen;  // kept sorted
  for (int idx : ctx.price_order) {
    if (static_cast<int>(chosen.size()) == n) break;
    const int t = p.mask.slots[static_cast<size_t>(idx)];
    auto it = std::lower_bound(chosen.begin(), chosen.end(), t);
    bool ok = true;
    if (it != chosen.begin()) {
      const int prev = *(it - 1);
      const int gap = t - prev - 1;
      if (gap >= 1 && gap <= p.min_off_slots) ok = false;
    }
    if (ok && it != chosen.end()) {
      const int next = *it;
      const int gap = next - t - 1;
      if (gap >= 1 && gap <= p.min_off_slots) ok = false;
    }
    if (ok) chosen.insert(it, t);
  }
  if (static_cast<int>(chosen.size()) != n) return std::nullopt;
  return chosen;
}

}  // namespace

ChargeSchedule solve_schedule(const SchedulingProblem& p) {
  validate_problem(p);
  if (p.e_required_kwh <= kTol) return empty_schedule(p);
  if (!problem_is_feasible(p)) {
    throw InfeasibleError(
        "solve_schedule: ev " + std::to_string(p.mask.ev_id) +
            " cannot deliver " + std::to_string(p.e_required_kwh) + " kWh within its mask",
        max_deliverable_kwh(p));
  }

  BnbContext ctx{p, {}, {}, p.e_required_kwh / p.grid.slot_hours, 0, 0, {}, {}, {}};
  const int s = p.grid.slots;
  const int k = static_cast<int>(p.mask.slots.size());
  {
    const CountBounds counts = count_bounds(p);
    ctx.count_lo = counts.lo;
    ctx.count_hi = counts.hi;
  }
  ctx.pooled_link.assign(static_cast<size_t>(k), 0);
  ctx.pooled_switch_seen.assign(static_cast<size_t>(k) *
                                    static_cast<size_t>(std::max(1, p.min_off_slots)),
                                0);
  ctx.mask_index_of.assign(static_cast<size_t>(s), -1);
  for (int i = 0; i < k; ++i)
    ctx.mask_index_of[static_cast<size_t>(p.mask.slots[static_cast<size_t>(i)])] = i;
  {
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      const int sa = p.mask.slots[static_cast<size_t>(a)];
      const int sb = p.mask.slots[static_cast<size_t>(b)];
      const double fa = p.price_cents_per_kwh[static_cast<size_t>(sa)];
      const double fb = p.price_cents_per_kwh[static_cast<size_t>(sb)];
      if (fa != fb) return fa < fb;
      const std::uint64_t ka = tie_key(p.mask.ev_id, sa);
      const std::uint64_t kb = tie_key(p.mask.ev_id, sb);
      if (ka != kb) return ka < kb;
      return sa < sb;
    });
    ctx.price_order = std::move(idx);
  }

  // Incumbents: cheapest-n prefixes when they happen to be feasible, plus
  // switching-aware greedy sets, over the few viable on counts.
  std::optional<ChargeSchedule> incumbent;
  auto offer = [&](const std::vector<int>& on) {
    auto fill = greedy_fill(p, on);
    if (fill && (!incumbent || fill->cost_cents < incumbent->cost_cents))
      incumbent = schedule_from_fill(p, on, std::move(*fill));
  };
  const CountBounds cb = count_bounds(p);
  for (int n = cb.lo; n <= std::min(cb.hi, cb.lo + 8); ++n) {
    if (n > k) break;
    std::vector<int> on;
    on.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      on.push_back(p.mask.slots[static_cast<size_t>(ctx.price_order[static_cast<size_t>(j)])]);
    std::sort(on.begin(), on.end());
    if (switching_ok(on, p.min_off_slots)) offer(on);
    if (const auto set = greedy_feasible_set(ctx, n)) offer(*set);
  }

  // Pruning uses a relative epsilon three orders of magnitude inside the
  // guaranteed optimality gap; it only collapses plateaus of equal-cost
  // schedules, where any of them is an optimal answer.
  const auto prune_level = [&](const std::optional<ChargeSchedule>& inc) {
    if (!inc) return std::numeric_limits<double>::infinity();
    return inc->cost_cents - std::max(1e-12, 1e-9 * std::abs(inc->cost_cents));
  };

  struct Node {
    std::vector<std::int8_t> fixed;
    double bound_hint = -std::numeric_limits<double>::infinity();
  };
  std::vector<Node> stack;
  stack.push_back(Node{std::vector<std::int8_t>(static_cast<size_t>(k), kFree),
                       -std::numeric_limits<double>::infinity()});
  long nodes = 0;
  const long node_cap = 2'000'000;
  const int enumerate_below = 9;
  bool capped = false;

  while (!stack.empty()) {
    if (++nodes > node_cap) {
      capped = true;
      break;
    }
    std::vector<std::int8_t> fixed = std::move(stack.back().fixed);
    const double hint = stack.back().bound_hint;
    stack.pop_back();
    if (hint >= prune_level(incumbent)) continue;  // parent bound is inherited

    if (!propagate_switching(ctx, fixed)) continue;

    const auto box = box_bound(ctx, fixed);
    if (!box) continue;
    if (*box >= prune_level(incumbent)) continue;

    std::vector<int> free_idx;  // in price order, cheapest first
    for (int i : ctx.price_order)
      if (fixed[static_cast<size_t>(i)] == kFree) free_idx.push_back(i);

    if (static_cast<int>(free_idx.size()) <= enumerate_below) {
      enumerate_small_subtree(ctx, fixed, free_idx, 0, incumbent);
      continue;
    }

    NodeLp node = build_node_lp(ctx, fixed);
    const lp::Solution sol = solve_node_relaxation(ctx, fixed, node);
    if (sol.status == lp::Status::infeasible) continue;

    int branch_index = -1;
    bool branch_on_first = true;
    double node_bound = *box;
    if (sol.status == lp::Status::optimal) {
      node_bound = sol.objective + node.objective_const;
      if (node_bound >= prune_level(incumbent)) continue;
      double most_frac = 1e-7;
      for (int i = 0; i < k; ++i) {
        const int yv = node.y_var[static_cast<size_t>(i)];
        if (yv < 0) continue;
        const double y = sol.x[static_cast<size_t>(yv)];
        const double frac = std::min(y, 1.0 - y);
        if (frac > most_frac) {
          most_frac = frac;
          branch_index = i;
          branch_on_first = y >= 0.5;  // dive with the LP rounding
        }
      }
      if (branch_index < 0) {
        // integral relaxation: evaluate as a leaf when it is genuinely
        // feasible; an unconverged cut loop can hand back an integral
        // point that still breaks a switching row, which only means we
        // must keep branching
        std::vector<int> on;
        for (int i = 0; i < k; ++i) {
          const int yv = node.y_var[static_cast<size_t>(i)];
          const bool is_on = yv >= 0 ? sol.x[static_cast<size_t>(yv)] >= 0.5
                                     : fixed[static_cast<size_t>(i)] == kOn;
          if (is_on) on.push_back(p.mask.slots[static_cast<size_t>(i)]);
        }
        if (switching_ok(on, p.min_off_slots)) {
          auto fill = greedy_fill(p, on);
          if (fill && (!incumbent || fill->cost_cents < incumbent->cost_cents))
            incumbent = schedule_from_fill(p, on, std::move(*fill));
          continue;
        }
        branch_index = free_idx.front();
      }
    } else {
      branch_index = free_idx.front();  // LP stalled; branch without a bound
    }

    auto second = fixed;
    second[static_cast<size_t>(branch_index)] = branch_on_first ? kOff : kOn;
    auto first = std::move(fixed);
    first[static_cast<size_t>(branch_index)] = branch_on_first ? kOn : kOff;
    stack.push_back(Node{std::move(second), node_bound});
    stack.push_back(Node{std::move(first), node_bound});  // explored first
  }

  if (!incumbent)
    throw InfeasibleError("solve_schedule: no feasible schedule for ev " +
                              std::to_string(p.mask.ev_id),
                          max_deliverable_kwh(p));
  incumbent->optimal = !capped;
  incumbent->gap = 0.0;
  if (capped) {
    double outstanding = incumbent->cost_cents;
    for (const auto& node : stack) {
      const auto b = box_bound(ctx, node.fixed);
      if (b) outstanding = std::min(outstanding, *b);
    }
    incumbent->gap = std::max(0.0, (incumbent->cost_cents - outstanding) /
                                       std::max(1.0, std::abs(incumbent->cost_cents)));
  }
  return *incumbent;
}

CommunityScheduleResult schedule_community(const CommunityScenario& scenario,
                                           const PriceCurve& prices,
                                           const std::vector<AvailabilityMask>& masks,
                                           const ScheduleParams& params, int threads) {
  const auto evs = scenario.all_evs();
  std::vector<const EvProfile*> by_id;
  for (const EvProfile* ev : evs) {
    if (ev->id >= static_cast<int>(by_id.size())) by_id.resize(static_cast<size_t>(ev->id) + 1);
    by_id[static_cast<size_t>(ev->id)] = ev;
  }

  CommunityScheduleResult result;
  result.schedules.resize(masks.size());
  std::vector<std::exception_ptr> errors(masks.size());

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(masks.size())));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= masks.size()) break;
      try {
        const AvailabilityMask& mask = masks[i];
        if (mask.ev_id < 0 || mask.ev_id >= static_cast<int>(by_id.size()) ||
            by_id[static_cast<size_t>(mask.ev_id)] == nullptr)
          throw ParameterError("schedule_community: unknown ev id " +
                               std::to_string(mask.ev_id));
        const EvProfile& ev = *by_id[static_cast<size_t>(mask.ev_id)];
        SchedulingProblem prob;
        prob.grid = prices.grid;
        prob.price_cents_per_kwh = prices.cents_per_kwh;
        prob.mask = mask;
        prob.e_required_kwh = ev.daily_energy_kwh;
        prob.p_min_kw = params.p_min_kw;
        prob.p_max_kw = params.p_max_kw;
        prob.min_off_slots = off_slots_from_minutes(prices.grid, params.t_off_on_minutes);
        result.schedules[i] = solve_schedule(prob);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);  // lowest mask index first

  result.ev_total = zero_series(scenario.grid);
  for (const auto& cs : result.schedules)
    for (int t = 0; t < scenario.grid.slots; ++t)
      result.ev_total.kw[static_cast<size_t>(t)] += cs.power_kw[static_cast<size_t>(t)];
  result.combined_total = add_series(aggregate_residential(scenario), result.ev_total);
  return result;
}

}  // namespace evsched
