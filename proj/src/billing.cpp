#include "billopt/billing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace billopt {

double BillBreakdown::tou_demand_total() const {
  double sum = 0.0;
  for (const auto& [label, charge] : tou_demand_charges) sum += charge;
  return sum;
}

BillBreakdown bill_of_net_demand(const MonthlyInstance& inst, const std::vector<double>& net_kw) {
  if (net_kw.size() != static_cast<size_t>(inst.grid.count))
    throw InvalidInput("net demand series length does not match the grid");
  const double h = inst.grid.step_hours();

  BillBreakdown bill;
  double max_net = 0.0;
  double energy = 0.0;
  double nem = 0.0;
  for (int t = 0; t < inst.grid.count; ++t) {
    double net = net_kw[t];
    max_net = std::max(max_net, net);
    double imported = std::max(net, 0.0);
    energy += imported * inst.energy_rate[t];
    nem += (net - imported) * inst.nem_sell_rate[t];
  }
  bill.max_demand_charge = std::max(max_net, 0.0) * inst.monthly_demand_rate;
  bill.energy_charge = h * energy;
  bill.nem_revenue = h * nem;

  for (const auto& period : inst.demand_periods.periods) {
    double peak = 0.0;
    for (int t : period.intervals) peak = std::max(peak, net_kw[t]);
    bill.tou_demand_charges.emplace_back(period.label, peak * period.rate_per_kw);
  }

  bill.total = bill.max_demand_charge + bill.tou_demand_total() + bill.energy_charge +
               bill.nem_revenue;
  return bill;
}

BillBreakdown bill_of_dispatch(const MonthlyInstance& inst, const BatteryDispatch& dispatch,
                               double validation_tolerance) {
  ValidationResult check =
      validate_dispatch(inst.spec, dispatch, inst.base_demand_kw, validation_tolerance);
  if (!check.ok())
    throw InvalidInput("dispatch rejected for " + inst.label + ": " + check.summary());

  std::vector<double> net(inst.grid.count);
  for (int t = 0; t < inst.grid.count; ++t)
    net[t] = inst.base_demand_kw[t] - inst.pv_kw[t] + dispatch.charge_kw[t] -
             dispatch.discharge_kw[t];
  return bill_of_net_demand(inst, net);
}

namespace {

// Shared DFS state for the enumeration oracle. Pruning has three layers:
// the battery envelope with terminal-SOC reachability, an admissible cost
// bound (demand charges so far plus the best possible tail of per-step
// energy costs), and exact-state dominance. For the last one, the action
// grid quantum and a rational efficiency put every reachable SOC on an
// integer lattice, so two prefixes reaching the same (t, SOC) compare
// exactly; the one that is no cheaper and no lower on every running
// demand maximum can be cut.
struct Enumerator {
  const MonthlyInstance& inst;
  const OracleOptions& opt;
  int T;
  double h, eta;
  std::vector<double> actions;             // net battery power grid, ascending
  std::vector<std::vector<int>> order;     // per t, action indices by step cost
  std::vector<double> suffix_min_cost;     // admissible lower bound on the tail
  std::vector<int> period_of_t;            // index into demand_periods, -1 = none
  long nodes = 0;

  // SOC lattice: with eta = eta_num / eta_den, action index i shifts the
  // state by (2i - (L-1)) * eta_num lattice units when charging and
  // (2i - (L-1)) * eta_den units when discharging, all integers. One unit is
  // su kWh.
  bool lattice_ok = false;
  std::int64_t eta_num = 0, eta_den = 0;
  std::int64_t lat_range = 0;
  double su = 0.0;
  double dp_slack = 0.0;
  // Exact tail bound: minimum remaining energy cost from (t, lattice state)
  // through a feasible, SOC-neutral completion. Infinity marks dead ends, so
  // this subsumes terminal reachability.
  std::vector<double> tail;
  double tail_at(int t, std::int64_t n) const {
    return tail[static_cast<size_t>(t) * (2 * lat_range + 1) + n + lat_range];
  }

  struct Mark {
    double cost;
    double max_net;
    double period0;  // single tracked period is enough for the toy instances
  };
  std::unordered_map<std::uint64_t, std::vector<Mark>> seen;
  int tracked_periods = 0;

  // Net demand can only take one value per (t, action), so running maxima
  // live on a small sorted level set; tracking their indices gives an exact
  // state key. Revisiting (t, SOC, max levels) with a cost that is not
  // strictly better is pointless.
  std::vector<double> net_levels;               // sorted distinct net values
  std::vector<std::vector<int>> level_of;       // per t, per action: index + 1
  std::unordered_map<std::uint64_t, double> best_cost_at;

  // Floors on the final maxima: whatever happens later, every remaining
  // interval contributes at least its minimum achievable net demand.
  std::vector<double> suffix_net_floor;     // over all intervals
  std::vector<double> suffix_net_floor_p0;  // over period-0 intervals only

  std::vector<double> chg, dis, net;
  std::vector<double> best_chg, best_dis;
  double best_bill = kInf;
  bool have_best = false;

  Enumerator(const MonthlyInstance& inst_, int power_levels, const OracleOptions& opt_)
      : inst(inst_), opt(opt_), T(inst_.grid.count), h(inst_.grid.step_hours()),
        eta(inst_.spec.round_trip_efficiency) {
    double bpr = inst.spec.power_rating_kw;
    if (bpr == 0.0) {
      actions = {0.0};
    } else {
      actions.resize(power_levels);
      for (int i = 0; i < power_levels; ++i)
        actions[i] = -bpr + 2.0 * bpr * i / (power_levels - 1);
    }
    for (std::int64_t den = 1; den <= 64; ++den) {
      double num = eta * den;
      if (std::fabs(num - std::llround(num)) < 1e-9) {
        eta_num = std::llround(num);
        eta_den = den;
        lattice_ok = true;
        break;
      }
    }
    chg.assign(T, 0.0);
    dis.assign(T, 0.0);
    net.assign(T, 0.0);
    if (lattice_ok) build_tail_bound();

    net_levels.reserve(static_cast<size_t>(T) * actions.size());
    for (int t = 0; t < T; ++t)
      for (double a : actions)
        net_levels.push_back(inst.base_demand_kw[t] - inst.pv_kw[t] + (a > 0.0 ? a : 0.0) -
                             (a < 0.0 ? -a : 0.0));
    std::sort(net_levels.begin(), net_levels.end());
    net_levels.erase(std::unique(net_levels.begin(), net_levels.end()), net_levels.end());
    level_of.assign(T, std::vector<int>(actions.size(), 0));
    for (int t = 0; t < T; ++t)
      for (size_t i = 0; i < actions.size(); ++i) {
        double n = inst.base_demand_kw[t] - inst.pv_kw[t] + (actions[i] > 0.0 ? actions[i] : 0.0) -
                   (actions[i] < 0.0 ? -actions[i] : 0.0);
        level_of[t][i] = static_cast<int>(
            std::lower_bound(net_levels.begin(), net_levels.end(), n) - net_levels.begin() + 1);
      }

  }

  // Needs period_of_t, so it runs after the caller fills that in.
  void finish_setup() {
    suffix_net_floor.assign(T + 1, -kInf);
    suffix_net_floor_p0.assign(T + 1, -kInf);
    for (int t = T - 1; t >= 0; --t) {
      double lo = kInf;
      for (double a : actions) {
        if (-a > inst.base_demand_kw[t] + opt.tolerance) continue;  // export never allowed
        lo = std::min(lo, inst.base_demand_kw[t] - inst.pv_kw[t] + (a > 0.0 ? a : 0.0) -
                              (a < 0.0 ? -a : 0.0));
      }
      suffix_net_floor[t] = std::max(suffix_net_floor[t + 1], lo);
      bool in_p0 = period_of_t[t] == 0;
      suffix_net_floor_p0[t] =
          in_p0 ? std::max(suffix_net_floor_p0[t + 1], lo) : suffix_net_floor_p0[t + 1];
    }

    // Per-step cost of each action, for ordering and for the admissible tail
    // bound. The bound may assume the export rule but nothing SOC-dependent.
    order.resize(T);
    suffix_min_cost.assign(T + 1, 0.0);
    std::vector<double> step_min(T, 0.0);
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<double, int>> ranked;
      double lo = kInf;
      for (size_t i = 0; i < actions.size(); ++i) {
        double c = step_cost(t, actions[i]);
        ranked.emplace_back(c, static_cast<int>(i));
        if (-actions[i] <= inst.base_demand_kw[t] + opt.tolerance) lo = std::min(lo, c);
      }
      std::sort(ranked.begin(), ranked.end());
      for (auto& [c, i] : ranked) order[t].push_back(i);
      step_min[t] = lo;
    }
    for (int t = T - 1; t >= 0; --t) suffix_min_cost[t] = suffix_min_cost[t + 1] + step_min[t];
  }

  double step_cost(int t, double action) const {
    double cha = action > 0.0 ? action : 0.0;
    double d = action < 0.0 ? -action : 0.0;
    double n = inst.base_demand_kw[t] - inst.pv_kw[t] + cha - d;
    double imported = std::max(n, 0.0);
    return h * (imported * inst.energy_rate[t] + (n - imported) * inst.nem_sell_rate[t]);
  }

  // Action feasibility from a given SOC, shared by the DFS and the tail DP.
  // The DP uses the looser dp_slack so floating-point drift between the
  // accumulated SOC and the lattice-mapped SOC can never make the bound
  // inadmissible.
  bool action_ok(int t, double action, double soc, double slack) const {
    double cha = action > 0.0 ? action : 0.0;
    double d = action < 0.0 ? -action : 0.0;
    if (d > 0.0 && d > inst.base_demand_kw[t] + slack) return false;  // no export
    if (h * eta * cha > inst.spec.energy_rating_kwh - soc + slack) return false;
    if (h * d > soc + slack) return false;
    double soc_next = soc_step(soc, cha, d, eta, h);
    return soc_next >= inst.spec.soc_min_kwh - slack && soc_next <= inst.spec.soc_max_kwh + slack;
  }

  std::int64_t lattice_delta(int idx) const {
    std::int64_t units = 2LL * idx - (static_cast<std::int64_t>(actions.size()) - 1);
    return units > 0 ? units * eta_num : units * eta_den;
  }

  void build_tail_bound() {
    int L = static_cast<int>(actions.size());
    su = L > 1 ? h * inst.spec.power_rating_kw / ((L - 1) * eta_den) : 0.0;
    dp_slack = opt.tolerance + 1e-9 * (1.0 + inst.spec.energy_rating_kwh);
    lat_range = static_cast<std::int64_t>(T) * (L - 1) * eta_den;
    size_t width = static_cast<size_t>(2 * lat_range + 1);
    if (width * (T + 1) > 20'000'000) {
      lattice_ok = false;  // fall back to the loose bound
      return;
    }
    tail.assign(width * (T + 1), kInf);
    // Success: end within tolerance of J_init (lattice 0 when su > 0).
    for (std::int64_t n = -lat_range; n <= lat_range; ++n)
      if (std::fabs(n * su) <= dp_slack)
        tail[static_cast<size_t>(T) * width + n + lat_range] = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      for (std::int64_t n = -lat_range; n <= lat_range; ++n) {
        double soc = inst.spec.soc_init_kwh + n * su;
        double best = kInf;
        for (int idx = 0; idx < L; ++idx) {
          if (!action_ok(t, actions[idx], soc, dp_slack)) continue;
          std::int64_t n_next = n + lattice_delta(idx);
          if (n_next < -lat_range || n_next > lat_range) continue;
          double rest = tail[static_cast<size_t>(t + 1) * width + n_next + lat_range];
          if (rest == kInf) continue;
          double total = step_cost(t, actions[idx]) + rest;
          if (total < best) best = total;
        }
        tail[static_cast<size_t>(t) * width + n + lat_range] = best;
      }
    }
  }

  // Minimum-energy lattice path with every interval's net demand capped at
  // `cap` (+inf = unconstrained). Each such path is a feasible dispatch;
  // priced with its true demand charges it seeds the branch-and-bound
  // incumbent. Running it for a spread of peak caps covers the
  // energy-vs-demand-charge tradeoff well enough that the search mostly
  // verifies.
  void seed_min_energy_path(double cap) {
    if (!lattice_ok) return;
    size_t width = static_cast<size_t>(2 * lat_range + 1);
    std::vector<double> g(width * (T + 1), kInf);
    for (std::int64_t n = -lat_range; n <= lat_range; ++n)
      if (std::fabs(n * su) <= dp_slack) g[static_cast<size_t>(T) * width + n + lat_range] = 0.0;
    auto net_of = [&](int t, int idx) {
      double a = actions[idx];
      return inst.base_demand_kw[t] - inst.pv_kw[t] + (a > 0.0 ? a : 0.0) - (a < 0.0 ? -a : 0.0);
    };
    for (int t = T - 1; t >= 0; --t) {
      for (std::int64_t n = -lat_range; n <= lat_range; ++n) {
        double soc = inst.spec.soc_init_kwh + n * su;
        double best = kInf;
        for (size_t idx = 0; idx < actions.size(); ++idx) {
          if (net_of(t, static_cast<int>(idx)) > cap + 1e-12) continue;
          if (!action_ok(t, actions[idx], soc, dp_slack)) continue;
          std::int64_t n_next = n + lattice_delta(static_cast<int>(idx));
          if (n_next < -lat_range || n_next > lat_range) continue;
          double rest = g[static_cast<size_t>(t + 1) * width + n_next + lat_range];
          if (rest == kInf) continue;
          double total = step_cost(t, actions[idx]) + rest;
          if (total < best) best = total;
        }
        g[static_cast<size_t>(t) * width + n + lat_range] = best;
      }
    }
    if (g[lat_range] == kInf) return;  // no feasible path under this cap

    std::int64_t n = 0;
    double soc = inst.spec.soc_init_kwh;
    for (int t = 0; t < T; ++t) {
      int pick = -1;
      double target = g[static_cast<size_t>(t) * width + n + lat_range];
      for (size_t idx = 0; idx < actions.size(); ++idx) {
        if (net_of(t, static_cast<int>(idx)) > cap + 1e-12) continue;
        if (!action_ok(t, actions[idx], soc, dp_slack)) continue;
        std::int64_t n_next = n + lattice_delta(static_cast<int>(idx));
        if (n_next < -lat_range || n_next > lat_range) continue;
        double rest = g[static_cast<size_t>(t + 1) * width + n_next + lat_range];
        if (rest == kInf) continue;
        if (std::fabs(step_cost(t, actions[idx]) + rest - target) <=
            1e-9 * (1.0 + std::fabs(target))) {
          pick = static_cast<int>(idx);
          n = n_next;
          break;
        }
      }
      if (pick < 0) return;  // numerical tie trouble; earlier seeds stand
      double action = actions[pick];
      chg[t] = action > 0.0 ? action : 0.0;
      dis[t] = action < 0.0 ? -action : 0.0;
      net[t] = inst.base_demand_kw[t] - inst.pv_kw[t] + chg[t] - dis[t];
      soc = soc_step(soc, chg[t], dis[t], eta, h);
    }
    if (std::fabs(soc - inst.spec.soc_init_kwh) <= opt.tolerance) consider_leaf();
    std::fill(chg.begin(), chg.end(), 0.0);
    std::fill(dis.begin(), dis.end(), 0.0);
  }

  void seed_incumbents() {
    if (!lattice_ok) return;
    seed_min_energy_path(kInf);
    // Peak caps spanning the lowest reachable peak up to the uncapped one.
    double lo = suffix_net_floor[0];
    double idle_peak = -kInf;
    for (int t = 0; t < T; ++t)
      idle_peak = std::max(idle_peak, inst.base_demand_kw[t] - inst.pv_kw[t]);
    if (!(idle_peak > lo)) return;
    for (int k = 0; k <= 12; ++k)
      seed_min_energy_path(lo + (idle_peak - lo) * k / 12.0);
  }

  // Lower bound on the final demand charges: the running maxima pushed up by
  // the unavoidable future floor.
  double demand_floor(int t, double max_net, const std::vector<double>& period_max) const {
    double effective = std::max(max_net, suffix_net_floor[t]);
    double sum = std::max(effective, 0.0) * inst.monthly_demand_rate;
    for (size_t p = 0; p < period_max.size(); ++p) {
      double pmax = period_max[p];
      if (p == 0) pmax = std::max(pmax, suffix_net_floor_p0[t]);
      sum += std::max(pmax, 0.0) * inst.demand_periods.periods[p].rate_per_kw;
    }
    return sum;
  }

  void consider_leaf() {
    BillBreakdown bill = bill_of_net_demand(inst, net);
    if (bill.total < best_bill) {
      best_bill = bill.total;
      best_chg = chg;
      best_dis = dis;
      have_best = true;
    }
  }

  // True when an already-expanded state at (t, soc_lattice) makes this one
  // redundant; otherwise records it. Only the first tracked period joins the
  // dominance vector; instances with more fall back to pure bounding.
  bool dominated(int t, std::int64_t lattice, double cost, double max_net,
                 const std::vector<double>& period_max) {
    if (!lattice_ok || tracked_periods > 1) return false;
    double p0 = tracked_periods == 1 ? period_max[0] : 0.0;
    std::uint64_t key =
        (static_cast<std::uint64_t>(t) << 48) ^ static_cast<std::uint64_t>(lattice + (1LL << 40));
    auto& marks = seen[key];
    for (const auto& m : marks)
      if (m.cost <= cost + 1e-12 && m.max_net <= max_net + 1e-12 && m.period0 <= p0 + 1e-12)
        return true;
    if (marks.size() < 8) marks.push_back({cost, max_net, p0});
    return false;
  }

  bool use_key_memo() const {
    return lattice_ok && tracked_periods <= 1 && T <= 15 &&
           2 * lat_range < 65536 && net_levels.size() + 1 < 4096;
  }

  void search(int t, double soc, std::int64_t lattice, double energy_cost, int max_idx,
              int mp_idx, double max_net, std::vector<double>& period_max) {
    if (t == T) {
      if (std::fabs(soc - inst.spec.soc_init_kwh) <= opt.tolerance) consider_leaf();
      return;
    }
    if (++nodes > opt.node_budget)
      throw InvalidInput("oracle enumeration guard exceeded (" +
                         std::to_string(opt.node_budget) +
                         " nodes); use a smaller instance or fewer power levels");

    double tail_cost;
    if (lattice_ok) {
      tail_cost = tail_at(t, lattice);
      if (tail_cost == kInf) return;  // no SOC-neutral completion exists
    } else {
      // Loose fallback: reachability plus the best per-step energy costs.
      int remaining = T - t;
      double reach = h * inst.spec.power_rating_kw * remaining;
      if (inst.spec.soc_init_kwh > soc + eta * reach + opt.tolerance ||
          inst.spec.soc_init_kwh < soc - reach - opt.tolerance)
        return;
      tail_cost = suffix_min_cost[t];
    }
    if (energy_cost + demand_floor(t, max_net, period_max) + tail_cost >= best_bill - 1e-12)
      return;

    if (t > 0 && use_key_memo()) {
      std::uint64_t key = (static_cast<std::uint64_t>(t) << 40) |
                          (static_cast<std::uint64_t>(lattice + lat_range) << 24) |
                          (static_cast<std::uint64_t>(max_idx) << 12) |
                          static_cast<std::uint64_t>(mp_idx);
      auto [it, inserted] = best_cost_at.try_emplace(key, energy_cost);
      if (!inserted) {
        if (energy_cost >= it->second - 1e-12) return;
        it->second = energy_cost;
      }
    }
    if (t > 0 && dominated(t, lattice, energy_cost, max_net, period_max)) return;

    for (int idx : order[t]) {
      double action = actions[idx];
      if (!action_ok(t, action, soc, opt.tolerance)) continue;
      double cha = action > 0.0 ? action : 0.0;
      double d = action < 0.0 ? -action : 0.0;
      double soc_next = soc_step(soc, cha, d, eta, h);
      std::int64_t lattice_next = lattice + lattice_delta(idx);

      chg[t] = cha;
      dis[t] = d;
      double n = inst.base_demand_kw[t] - inst.pv_kw[t] + cha - d;
      net[t] = n;

      double saved_max = max_net;
      int p = period_of_t.empty() ? -1 : period_of_t[t];
      double saved_period = p >= 0 ? period_max[p] : 0.0;
      max_net = std::max(max_net, n);
      if (p >= 0) period_max[p] = std::max(period_max[p], n);
      int next_max_idx = std::max(max_idx, level_of[t][idx]);
      int next_mp_idx = p == 0 ? std::max(mp_idx, level_of[t][idx]) : mp_idx;

      search(t + 1, soc_next, lattice_next, energy_cost + step_cost(t, action), next_max_idx,
             next_mp_idx, max_net, period_max);

      max_net = saved_max;
      if (p >= 0) period_max[p] = saved_period;
    }
    chg[t] = dis[t] = 0.0;
  }
};

}  // namespace

OracleResult brute_force_optimal(const MonthlyInstance& inst, int power_levels,
                                 const OracleOptions& options) {
  inst.validate();
  if (inst.grid.count > 12)
    throw InvalidInput("enumeration oracle is limited to 12 intervals, got " +
                       std::to_string(inst.grid.count) + "; use dp_optimal");
  if (power_levels < 2) throw InvalidInput("need at least 2 power levels");

  Enumerator en(inst, power_levels, options);

  // Interval -> demand-period membership. The enumeration tracks one running
  // maximum per period; intervals in several periods (TOU + daily) fall back
  // to leaf-side pricing, which stays exact because leaves reprice fully.
  en.period_of_t.assign(en.T, -1);
  {
    std::vector<int> hits(en.T, 0);
    for (size_t p = 0; p < inst.demand_periods.periods.size(); ++p)
      for (int t : inst.demand_periods.periods[p].intervals) {
        ++hits[t];
        en.period_of_t[t] = static_cast<int>(p);
      }
    for (int t = 0; t < en.T; ++t)
      if (hits[t] > 1) en.period_of_t[t] = -1;  // keep the bound admissible
  }

  en.tracked_periods = static_cast<int>(inst.demand_periods.periods.size());
  en.finish_setup();

  // The idle dispatch seeds the incumbent; it is always feasible. Capped
  // minimum-energy paths tighten it across the demand-charge tradeoff.
  {
    BatteryDispatch idle = idle_dispatch(inst.spec, inst.grid);
    en.best_bill = bill_of_dispatch(inst, idle, options.tolerance).total;
    en.best_chg = idle.charge_kw;
    en.best_dis = idle.discharge_kw;
    en.have_best = true;
    en.seed_incumbents();
  }

  std::vector<double> period_max(inst.demand_periods.periods.size(), 0.0);
  en.search(0, inst.spec.soc_init_kwh, 0, 0.0, 0, 0, -kInf, period_max);

  OracleResult out;
  out.bill = en.best_bill;
  out.nodes_visited = en.nodes;
  out.dispatch.grid = inst.grid;
  out.dispatch.charge_kw = en.best_chg;
  out.dispatch.discharge_kw = en.best_dis;
  out.dispatch.soc_kwh = recompute_soc(inst.spec, inst.grid, en.best_chg, en.best_dis);
  return out;
}

OracleResult dp_optimal(const MonthlyInstance& inst, int soc_levels) {
  inst.validate();
  const int T = inst.grid.count;
  if (T > 48) throw InvalidInput("dp oracle is limited to 48 intervals");
  if (soc_levels < 2 || soc_levels > 200)
    throw InvalidInput("soc_levels must lie in [2, 200]");

  const BatterySpec& bes = inst.spec;
  const double h = inst.grid.step_hours();
  const double eta = bes.round_trip_efficiency;
  const double span = bes.soc_max_kwh - bes.soc_min_kwh;
  const int S = span > 0.0 ? soc_levels : 1;
  const double cell = S > 1 ? span / (S - 1) : 0.0;
  auto level_value = [&](int s) { return bes.soc_min_kwh + cell * s; };

  // value[t][s]: cheapest separable cost reaching SOC level s after t+1
  // intervals, starting the month from the exact J_init.
  std::vector<std::vector<double>> value(T, std::vector<double>(S, kInf));
  std::vector<std::vector<int>> parent(T, std::vector<int>(S, -1));

  auto transition_cost = [&](int t, double soc_from, double soc_to, double& cha, double& dis) {
    double delta = soc_to - soc_from;
    cha = dis = 0.0;
    if (delta > 0.0) {
      cha = delta / (h * eta);
      if (cha > bes.power_rating_kw + 1e-12) return kInf;
      if (h * eta * cha > bes.energy_rating_kwh - soc_from + 1e-12) return kInf;
    } else if (delta < 0.0) {
      dis = -delta / h;
      if (dis > bes.power_rating_kw + 1e-12) return kInf;
      if (h * dis > soc_from + 1e-12) return kInf;
      if (dis > inst.base_demand_kw[t] + 1e-12) return kInf;  // no export
    }
    double n = inst.base_demand_kw[t] - inst.pv_kw[t] + cha - dis;
    double imported = std::max(n, 0.0);
    return h * (imported * inst.energy_rate[t] + (n - imported) * inst.nem_sell_rate[t]);
  };

  double cha, dis;
  for (int s = 0; s < S; ++s) {
    double c = transition_cost(0, bes.soc_init_kwh, level_value(s), cha, dis);
    if (c < kInf) value[0][s] = c;
  }
  for (int t = 1; t < T; ++t) {
    for (int sp = 0; sp < S; ++sp) {
      if (value[t - 1][sp] == kInf) continue;
      for (int s = 0; s < S; ++s) {
        double c = transition_cost(t, level_value(sp), level_value(s), cha, dis);
        if (c == kInf) continue;
        double total = value[t - 1][sp] + c;
        if (total < value[t][s]) {
          value[t][s] = total;
          parent[t][s] = sp;
        }
      }
    }
  }

  // Terminal: exact when J_init sits on the grid, otherwise one cell of
  // slack (discretization cannot hit J_init in that case).
  double nearest = kInf;
  for (int s = 0; s < S; ++s)
    nearest = std::min(nearest, std::fabs(level_value(s) - bes.soc_init_kwh));
  double terminal_slack = nearest <= 1e-9 ? 1e-9 : cell + 1e-12;
  int best_s = -1;
  double best_value = kInf;
  for (int s = 0; s < S; ++s) {
    if (std::fabs(level_value(s) - bes.soc_init_kwh) > terminal_slack) continue;
    if (value[T - 1][s] < best_value) {
      best_value = value[T - 1][s];
      best_s = s;
    }
  }
  if (best_s < 0) throw InvalidInput("dp oracle found no terminal state near J_init");

  std::vector<int> path(T);
  path[T - 1] = best_s;
  for (int t = T - 1; t > 0; --t) path[t - 1] = parent[t][path[t]];

  OracleResult out;
  out.dispatch.grid = inst.grid;
  out.dispatch.charge_kw.assign(T, 0.0);
  out.dispatch.discharge_kw.assign(T, 0.0);
  double soc_from = bes.soc_init_kwh;
  for (int t = 0; t < T; ++t) {
    transition_cost(t, soc_from, level_value(path[t]), cha, dis);
    out.dispatch.charge_kw[t] = cha;
    out.dispatch.discharge_kw[t] = dis;
    soc_from = level_value(path[t]);
  }
  out.dispatch.soc_kwh =
      recompute_soc(inst.spec, inst.grid, out.dispatch.charge_kw, out.dispatch.discharge_kw);

  std::vector<double> net(T);
  for (int t = 0; t < T; ++t)
    net[t] = inst.base_demand_kw[t] - inst.pv_kw[t] + out.dispatch.charge_kw[t] -
             out.dispatch.discharge_kw[t];
  out.bill = bill_of_net_demand(inst, net).total;
  out.nodes_visited = static_cast<long>(T) * S * S;
  return out;
}

}  // namespace billopt
