#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "billopt/solver.hpp"

// Bounded-variable primal simplex on sparse data. The basis is held as an LU
// factorization built by structural singleton peeling (simplex bases are
// nearly triangular) with a dense factor for the leftover bump, refreshed
// periodically; product-form etas carry the basis between refactorizations.
// Phase 1 minimizes the sum of bound violations with a long-step ratio test;
// phase 2 prices with Devex weights.

namespace billopt {

namespace {

constexpr double kPivotTol = 1e-9;      // smallest acceptable basis pivot
constexpr double kEtaDropTol = 1e-14;   // drop threshold for eta entries
constexpr double kRatioTol = 1e-9;      // column entries below this do not block
constexpr int kRefactorEvery = 100;      // eta count between refactorizations
constexpr int kMaxBumpSize = 4000;

class BasisFactor {
 public:
  // Columns of the basis: slot s holds variable basis[s]; its entries come
  // from the CSC arrays of [A | I].
  bool factor(int m, const std::vector<int>& basis, const std::vector<int>& cs,
              const std::vector<int>& cr, const std::vector<double>& cv) {
    m_ = m;
    prow_.clear(); pcol_.clear(); pval_.clear();
    lstart_.assign(1, 0); lrow_.clear(); lval_.clear();
    ustart_.assign(1, 0); ucol_.clear(); uval_.clear();
    clear_etas();
    if (m == 0) return true;

    // Basis adjacency, column-wise and row-wise.
    std::vector<int> cptr(m + 1, 0), crow, rptr(m + 1, 0), rslot;
    std::vector<double> cval, rval;
    int nnz = 0;
    for (int s = 0; s < m; ++s) {
      int var = basis[s];
      for (int k = cs[var]; k < cs[var + 1]; ++k)
        if (cv[k] != 0.0) ++nnz;
    }
    crow.reserve(nnz); cval.reserve(nnz);
    for (int s = 0; s < m; ++s) {
      int var = basis[s];
      for (int k = cs[var]; k < cs[var + 1]; ++k) {
        if (cv[k] == 0.0) continue;
        crow.push_back(cr[k]);
        cval.push_back(cv[k]);
        ++rptr[cr[k] + 1];
      }
      cptr[s + 1] = static_cast<int>(crow.size());
    }
    for (int i = 0; i < m; ++i) rptr[i + 1] += rptr[i];
    rslot.resize(nnz); rval.resize(nnz);
    {
      std::vector<int> fill(rptr.begin(), rptr.end() - 1);
      for (int s = 0; s < m; ++s)
        for (int k = cptr[s]; k < cptr[s + 1]; ++k) {
          int at = fill[crow[k]]++;
          rslot[at] = s;
          rval[at] = cval[k];
        }
    }

    std::vector<char> row_active(m, 1), col_active(m, 1);
    std::vector<int> row_count(m, 0), col_count(m, 0);
    for (int s = 0; s < m; ++s) col_count[s] = cptr[s + 1] - cptr[s];
    for (int i = 0; i < m; ++i) row_count[i] = rptr[i + 1] - rptr[i];

    std::vector<int> col_stack, row_stack;
    for (int s = 0; s < m; ++s) {
      if (col_count[s] == 0) return false;  // structurally singular
      if (col_count[s] == 1) col_stack.push_back(s);
    }
    for (int i = 0; i < m; ++i) {
      if (row_count[i] == 0) return false;
      if (row_count[i] == 1) row_stack.push_back(i);
    }

    int pivots = 0;
    while (!col_stack.empty() || !row_stack.empty()) {
      if (!col_stack.empty()) {
        int s = col_stack.back();
        col_stack.pop_back();
        if (!col_active[s] || col_count[s] != 1) continue;
        int pr = -1;
        double pv = 0.0;
        for (int k = cptr[s]; k < cptr[s + 1]; ++k)
          if (row_active[crow[k]]) { pr = crow[k]; pv = cval[k]; break; }
        if (pr < 0 || std::fabs(pv) < kPivotTol) return false;
        prow_.push_back(pr); pcol_.push_back(s); pval_.push_back(pv);
        lstart_.push_back(static_cast<int>(lrow_.size()));  // empty L column
        row_active[pr] = 0;
        col_active[s] = 0;
        for (int k = rptr[pr]; k < rptr[pr + 1]; ++k) {
          int s2 = rslot[k];
          if (!col_active[s2]) continue;
          ucol_.push_back(s2);
          uval_.push_back(rval[k]);
          if (--col_count[s2] == 1) col_stack.push_back(s2);
        }
        ustart_.push_back(static_cast<int>(ucol_.size()));
        ++pivots;
      } else {
        int i = row_stack.back();
        row_stack.pop_back();
        if (!row_active[i] || row_count[i] != 1) continue;
        int ps = -1;
        double pv = 0.0;
        for (int k = rptr[i]; k < rptr[i + 1]; ++k)
          if (col_active[rslot[k]]) { ps = rslot[k]; pv = rval[k]; break; }
        if (ps < 0 || std::fabs(pv) < kPivotTol) return false;
        prow_.push_back(i); pcol_.push_back(ps); pval_.push_back(pv);
        ustart_.push_back(static_cast<int>(ucol_.size()));  // empty U row
        row_active[i] = 0;
        col_active[ps] = 0;
        for (int k = cptr[ps]; k < cptr[ps + 1]; ++k) {
          int r = crow[k];
          if (!row_active[r]) continue;
          lrow_.push_back(r);
          lval_.push_back(cval[k] / pv);
          if (--row_count[r] == 1) row_stack.push_back(r);
        }
        lstart_.push_back(static_cast<int>(lrow_.size()));
        ++pivots;
      }
    }

    // Bump: whatever peeling left behind gets a dense factor.
    if (pivots < m) {
      std::vector<int> brows, bcols;
      for (int i = 0; i < m; ++i)
        if (row_active[i]) brows.push_back(i);
      for (int s = 0; s < m; ++s)
        if (col_active[s]) bcols.push_back(s);
      int kb = static_cast<int>(brows.size());
      if (kb != static_cast<int>(bcols.size()) || kb > kMaxBumpSize) return false;
      std::vector<int> rowpos(m, -1);
      for (int r = 0; r < kb; ++r) rowpos[brows[r]] = r;
      std::vector<double> dense(static_cast<size_t>(kb) * kb, 0.0);
      for (int c = 0; c < kb; ++c) {
        int s = bcols[c];
        for (int k = cptr[s]; k < cptr[s + 1]; ++k)
          if (rowpos[crow[k]] >= 0) dense[static_cast<size_t>(rowpos[crow[k]]) * kb + c] = cval[k];
      }
      std::vector<int> perm = brows;
      for (int k = 0; k < kb; ++k) {
        int best = k;
        double bestmag = std::fabs(dense[static_cast<size_t>(k) * kb + k]);
        for (int r = k + 1; r < kb; ++r) {
          double mag = std::fabs(dense[static_cast<size_t>(r) * kb + k]);
          if (mag > bestmag) { best = r; bestmag = mag; }
        }
        if (bestmag < kPivotTol) return false;
        if (best != k) {
          for (int c = 0; c < kb; ++c)
            std::swap(dense[static_cast<size_t>(k) * kb + c], dense[static_cast<size_t>(best) * kb + c]);
          std::swap(perm[k], perm[best]);
        }
        double pv = dense[static_cast<size_t>(k) * kb + k];
        for (int r = k + 1; r < kb; ++r) {
          double mult = dense[static_cast<size_t>(r) * kb + k] / pv;
          dense[static_cast<size_t>(r) * kb + k] = mult;
          if (mult == 0.0) continue;
          for (int c = k + 1; c < kb; ++c)
            dense[static_cast<size_t>(r) * kb + c] -= mult * dense[static_cast<size_t>(k) * kb + c];
        }
      }
      for (int k = 0; k < kb; ++k) {
        prow_.push_back(perm[k]);
        pcol_.push_back(bcols[k]);
        pval_.push_back(dense[static_cast<size_t>(k) * kb + k]);
        for (int r = k + 1; r < kb; ++r) {
          double mult = dense[static_cast<size_t>(r) * kb + k];
          if (std::fabs(mult) > kEtaDropTol) { lrow_.push_back(perm[r]); lval_.push_back(mult); }
        }
        lstart_.push_back(static_cast<int>(lrow_.size()));
        for (int c = k + 1; c < kb; ++c) {
          double v = dense[static_cast<size_t>(k) * kb + c];
          if (std::fabs(v) > kEtaDropTol) { ucol_.push_back(bcols[c]); uval_.push_back(v); }
        }
        ustart_.push_back(static_cast<int>(ucol_.size()));
      }
    }
    return true;
  }

  void clear_etas() {
    etas_.clear();
    erow_.clear();
    eval_.clear();
  }

  int eta_count() const { return static_cast<int>(etas_.size()); }

  // Record the basis change "column w enters at slot p" (w = B^-1 a_q,
  // slot-indexed dense vector).
  void append_eta(const std::vector<double>& w, int p) {
    Eta eta;
    eta.slot = p;
    eta.pivot = w[p];
    eta.start = static_cast<int>(erow_.size());
    for (int i = 0; i < m_; ++i)
      if (i != p && std::fabs(w[i]) > kEtaDropTol) { erow_.push_back(i); eval_.push_back(w[i]); }
    eta.end = static_cast<int>(erow_.size());
    etas_.push_back(eta);
  }

  // Solve B x = v. `vrow` is indexed by constraint row and is consumed;
  // `xslot` (dense, zeroed here) receives the result indexed by basis slot.
  void ftran(std::vector<double>& vrow, std::vector<double>& xslot) const {
    int np = static_cast<int>(prow_.size());
    for (int k = 0; k < np; ++k) {
      double piv = vrow[prow_[k]];
      if (piv == 0.0) continue;
      for (int e = lstart_[k]; e < lstart_[k + 1]; ++e) vrow[lrow_[e]] -= lval_[e] * piv;
    }
    std::fill(xslot.begin(), xslot.end(), 0.0);
    for (int k = np - 1; k >= 0; --k) {
      double acc = vrow[prow_[k]];
      for (int e = ustart_[k]; e < ustart_[k + 1]; ++e) acc -= uval_[e] * xslot[ucol_[e]];
      xslot[pcol_[k]] = acc / pval_[k];
    }
    for (const Eta& eta : etas_) {
      double xp = xslot[eta.slot] / eta.pivot;
      if (xslot[eta.slot] != 0.0) xslot[eta.slot] = xp;
      if (xp == 0.0) continue;
      for (int e = eta.start; e < eta.end; ++e) xslot[erow_[e]] -= eval_[e] * xp;
    }
  }

  // Solve B^T y = v. `vslot` is indexed by basis slot and is consumed;
  // `zrow` receives the result indexed by constraint row.
  void btran(std::vector<double>& vslot, std::vector<double>& zrow) const {
    for (int k = static_cast<int>(etas_.size()) - 1; k >= 0; --k) {
      const Eta& eta = etas_[k];
      double acc = vslot[eta.slot];
      for (int e = eta.start; e < eta.end; ++e) acc -= eval_[e] * vslot[erow_[e]];
      vslot[eta.slot] = acc / eta.pivot;
    }
    int np = static_cast<int>(prow_.size());
    std::fill(zrow.begin(), zrow.end(), 0.0);
    for (int k = 0; k < np; ++k) {
      double z = vslot[pcol_[k]] / pval_[k];
      zrow[prow_[k]] = z;
      if (z == 0.0) continue;
      for (int e = ustart_[k]; e < ustart_[k + 1]; ++e) vslot[ucol_[e]] -= uval_[e] * z;
    }
    for (int k = np - 1; k >= 0; --k) {
      double acc = zrow[prow_[k]];
      for (int e = lstart_[k]; e < lstart_[k + 1]; ++e) acc -= lval_[e] * zrow[lrow_[e]];
      zrow[prow_[k]] = acc;
    }
  }

 private:
  struct Eta {
    int slot = 0;
    double pivot = 0.0;
    int start = 0;
    int end = 0;
  };

  int m_ = 0;
  std::vector<int> prow_, pcol_;
  std::vector<double> pval_;
  std::vector<int> lstart_, lrow_;
  std::vector<double> lval_;
  std::vector<int> ustart_, ucol_;
  std::vector<double> uval_;
  std::vector<Eta> etas_;
  std::vector<int> erow_;
  std::vector<double> eval_;
};

enum VarStatus : std::int8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2, kNonbasicFree = 3 };

class SimplexSolver {
 public:
  SimplexSolver(const LpProblem& problem, const SolverConfig& config)
      : problem_(problem), config_(config) {}

  RawSolution run() {
    build();
    init_basis();
    if (!refactor()) return fail("initial basis factorization failed");

    long limit = config_.max_iterations > 0
                     ? config_.max_iterations
                     : 20000L + 40L * static_cast<long>(m_ + nstruct_);
    deadline_set_ = config_.time_limit_seconds > 0.0;
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(config_.time_limit_seconds));

    // Ratio tests skip sub-kRatioTol column entries, so basics can drift a
    // hair past their bounds over a long run; a fresh factorization plus a
    // phase-1 touch-up repairs that before the result is released. Numerical
    // trouble (a pivot-rejection loop or a basis the factorization rejects)
    // restarts from the slack basis with deterministically perturbed pricing
    // costs; the perturbation is removed before the final polish, so the
    // reported optimum always belongs to the true objective.
    const int kAttempts = 4;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      bool last = attempt == kAttempts - 1;
      if (attempt > 0) {
        reset_to_slack_basis();
        enable_perturbation(attempt);
      }
      RunState state = phase1(limit);
      if (state == RunState::numerical && !last) continue;
      if (state != RunState::done) return state_result(state, "phase 1");
      state = phase2(limit);
      if (state == RunState::numerical && !last) continue;
      if (state != RunState::done) return state_result(state, "phase 2");
      if (perturbed_) {
        disable_perturbation();
        state = phase2(limit);
        if (state == RunState::numerical && !last) continue;
        if (state != RunState::done) return state_result(state, "phase 2 (polish)");
      }
      if (!refactor()) {
        if (!last) continue;
        return fail("refactorization failed after phase 2");
      }
      if (infeasibility(nullptr) == 0.0) return finalize();
    }
    return fail("could not reach a clean feasible optimum");
  }

 private:
  enum class RunState { done, infeasible, unbounded, iteration_limit, time_limit, numerical };

  const LpProblem& problem_;
  SolverConfig config_;

  int m_ = 0, nstruct_ = 0, ntot_ = 0;
  std::vector<int> cs_, cr_;   // CSC of [A | I]
  std::vector<double> cv_;
  std::vector<int> rs_, rc_;   // CSR of the structural part
  std::vector<double> rv_;
  std::vector<double> lo_, up_, cost_;
  std::vector<double> rhs_;

  std::vector<int> basis_;          // slot -> variable
  std::vector<int> slot_of_;        // variable -> slot or -1
  std::vector<std::int8_t> vstat_;
  std::vector<double> xb_;          // slot -> value
  std::vector<double> d_;           // reduced costs (phase 2)
  std::vector<double> devex_;

  BasisFactor lu_;
  std::vector<double> work_row_, work_slot_, col_w_, rho_, alpha_;
  std::vector<int> alpha_list_;
  std::vector<char> alpha_mark_;
  long iterations_ = 0;
  int pivot_rejections_ = 0;
  int last_rejected_q_ = -1;
  std::vector<long> ban_until_;       // entering bans after noise-pivot rejections
  int ban_clears_ = 0;
  bool perturbed_ = false;
  std::vector<double> pricing_cost_;  // cost_ plus the active perturbation
  bool deadline_set_ = false;
  std::chrono::steady_clock::time_point deadline_;

  double feastol() const { return config_.feasibility_tolerance; }
  double dualtol() const { return config_.optimality_tolerance; }

  void build() {
    problem_.validate();
    nstruct_ = static_cast<int>(problem_.vars.size());
    m_ = static_cast<int>(problem_.rows.size());
    ntot_ = nstruct_ + m_;

    // CSC of the structural columns, slack identity appended.
    std::vector<int> count(ntot_ + 1, 0);
    size_t nnz = 0;
    for (const auto& row : problem_.rows) nnz += row.coeffs.size();
    for (const auto& row : problem_.rows)
      for (auto [j, a] : row.coeffs)
        if (a != 0.0) ++count[j + 1];
    for (int i = 0; i < m_; ++i) count[nstruct_ + i + 1] = 1;
    cs_.assign(ntot_ + 1, 0);
    for (int j = 0; j < ntot_; ++j) cs_[j + 1] = cs_[j] + count[j + 1];
    cr_.assign(cs_[ntot_], 0);
    cv_.assign(cs_[ntot_], 0.0);
    {
      std::vector<int> fill(cs_.begin(), cs_.end() - 1);
      for (int i = 0; i < m_; ++i) {
        for (auto [j, a] : problem_.rows[i].coeffs) {
          if (a == 0.0) continue;
          int at = fill[j]++;
          cr_[at] = i;
          cv_[at] = a;
        }
        int at = fill[nstruct_ + i]++;
        cr_[at] = i;
        cv_[at] = 1.0;
      }
    }
    // Merge duplicate (row, var) coefficients if the input carried any.
    for (int j = 0; j < nstruct_; ++j) {
      int begin = cs_[j], end = cs_[j + 1];
      bool dup = false;
      for (int k = begin + 1; k < end && !dup; ++k)
        for (int k2 = begin; k2 < k; ++k2)
          if (cr_[k2] == cr_[k]) { dup = true; break; }
      if (!dup) continue;
      std::vector<std::pair<int, double>> merged;
      for (int k = begin; k < end; ++k) {
        bool found = false;
        for (auto& [r, v] : merged)
          if (r == cr_[k]) { v += cv_[k]; found = true; break; }
        if (!found) merged.emplace_back(cr_[k], cv_[k]);
      }
      int at = begin;
      for (auto [r, v] : merged) { cr_[at] = r; cv_[at] = v; ++at; }
      for (; at < end; ++at) { cr_[at] = cr_[at == begin ? begin : at - 1]; cv_[at] = 0.0; }
    }

    // CSR of the structural part, for pivot-row assembly.
    rs_.assign(m_ + 1, 0);
    for (int j = 0; j < nstruct_; ++j)
      for (int k = cs_[j]; k < cs_[j + 1]; ++k)
        if (cv_[k] != 0.0) ++rs_[cr_[k] + 1];
    for (int i = 0; i < m_; ++i) rs_[i + 1] += rs_[i];
    rc_.assign(rs_[m_], 0);
    rv_.assign(rs_[m_], 0.0);
    {
      std::vector<int> fill(rs_.begin(), rs_.end() - 1);
      for (int j = 0; j < nstruct_; ++j)
        for (int k = cs_[j]; k < cs_[j + 1]; ++k) {
          if (cv_[k] == 0.0) continue;
          int at = fill[cr_[k]]++;
          rc_[at] = j;
          rv_[at] = cv_[k];
        }
    }

    lo_.resize(ntot_);
    up_.resize(ntot_);
    cost_.assign(ntot_, 0.0);
    for (int j = 0; j < nstruct_; ++j) {
      lo_[j] = problem_.vars[j].lower;
      up_[j] = problem_.vars[j].upper;
      cost_[j] = problem_.vars[j].objective;
    }
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      rhs_[i] = problem_.rows[i].rhs;
      int s = nstruct_ + i;
      switch (problem_.rows[i].sense) {
        case RowSense::le: lo_[s] = 0.0; up_[s] = kInf; break;
        case RowSense::ge: lo_[s] = -kInf; up_[s] = 0.0; break;
        case RowSense::eq: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
    }

    xb_.assign(m_, 0.0);
    d_.assign(ntot_, 0.0);
    devex_.assign(ntot_, 1.0);
    ban_until_.assign(ntot_, 0L);
    pricing_cost_ = cost_;
    work_row_.assign(m_, 0.0);
    work_slot_.assign(m_, 0.0);
    col_w_.assign(m_, 0.0);
    rho_.assign(m_, 0.0);
    alpha_.assign(ntot_, 0.0);
    alpha_mark_.assign(ntot_, 0);
  }

  void init_basis() {
    basis_.resize(m_);
    slot_of_.assign(ntot_, -1);
    vstat_.assign(ntot_, kAtLower);
    for (int j = 0; j < nstruct_; ++j) {
      if (std::isfinite(lo_[j])) vstat_[j] = kAtLower;
      else if (std::isfinite(up_[j])) vstat_[j] = kAtUpper;
      else vstat_[j] = kNonbasicFree;
    }
    for (int i = 0; i < m_; ++i) {
      basis_[i] = nstruct_ + i;
      vstat_[nstruct_ + i] = kBasic;
      slot_of_[nstruct_ + i] = i;
    }
  }

  double nb_value(int j) const {
    switch (vstat_[j]) {
      case kAtLower: return lo_[j];
      case kAtUpper: return up_[j];
      default: return 0.0;
    }
  }

  bool refactor() {
    if (!lu_.factor(m_, basis_, cs_, cr_, cv_)) return false;
    compute_xb();
    return true;
  }

  // Recovery path: the slack basis always factors.
  void reset_to_slack_basis() {
    init_basis();
    refactor();
    std::fill(ban_until_.begin(), ban_until_.end(), 0L);
    pivot_rejections_ = 0;
    last_rejected_q_ = -1;
  }

  // Deterministic cost perturbation for retry attempts: breaks the exact
  // degenerate ties that led the default pivot path into a numerically
  // hopeless basis. Removed again before the final polish.
  void enable_perturbation(int seed) {
    perturbed_ = true;
    for (int j = 0; j < ntot_; ++j) {
      std::uint64_t h = (static_cast<std::uint64_t>(j) + 1) * 2654435761u + seed * 97u;
      h ^= h >> 16;
      double r = static_cast<double>(h % 4096) / 4096.0;
      pricing_cost_[j] = cost_[j] + (1e-8 + 1e-7 * std::fabs(cost_[j])) * r;
    }
  }

  void disable_perturbation() {
    perturbed_ = false;
    pricing_cost_ = cost_;
  }

  // Entering-candidate ban bookkeeping after a rejected pivot. Returns true
  // when the caller should give up on this attempt.
  bool register_rejection(int q) {
    if (q == last_rejected_q_) {
      ban_until_[q] = iterations_ + 300;
      last_rejected_q_ = -1;
    } else {
      last_rejected_q_ = q;
    }
    return ++pivot_rejections_ > 16;
  }

  void compute_xb() {
    for (int i = 0; i < m_; ++i) work_row_[i] = rhs_[i];
    for (int j = 0; j < ntot_; ++j) {
      if (vstat_[j] == kBasic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      for (int k = cs_[j]; k < cs_[j + 1]; ++k) work_row_[cr_[k]] -= cv_[k] * v;
    }
    lu_.ftran(work_row_, xb_);
  }

  // Reduced costs d_j = c_j - y.a_j from the given slot-cost vector. Phase 1
  // prices against its violation costs, where every nonbasic cost is zero
  // (pass nullptr); phase 2 passes the (possibly perturbed) pricing costs.
  void compute_duals_and_d(const std::vector<double>& slot_cost,
                           const std::vector<double>* struct_costs, std::vector<double>& y,
                           std::vector<double>& d) {
    for (int i = 0; i < m_; ++i) work_slot_[i] = slot_cost[i];
    lu_.btran(work_slot_, y);
    for (int j = 0; j < ntot_; ++j) {
      if (vstat_[j] == kBasic) { d[j] = 0.0; continue; }
      double acc = struct_costs ? (*struct_costs)[j] : 0.0;
      for (int k = cs_[j]; k < cs_[j + 1]; ++k) acc -= y[cr_[k]] * cv_[k];
      d[j] = acc;
    }
  }

  void load_column(int j) {
    for (int i = 0; i < m_; ++i) work_row_[i] = 0.0;
    for (int k = cs_[j]; k < cs_[j + 1]; ++k) work_row_[cr_[k]] += cv_[k];
    lu_.ftran(work_row_, col_w_);
  }

  // A pivot far smaller than the rest of its column would poison the eta
  // file; reject it and let a fresh factorization (or a slack-basis restart)
  // produce a cleaner choice.
  bool pivot_acceptable(double pivot) const {
    double col_max = 0.0;
    for (int i = 0; i < m_; ++i) col_max = std::max(col_max, std::fabs(col_w_[i]));
    return std::fabs(pivot) >= kPivotTol * std::max(1.0, col_max);
  }

  // Pivot row alpha_j = rho . a_j for every nonbasic j, via the row-wise
  // structural matrix; slack entries are just rho itself.
  void compute_pivot_row(const std::vector<double>& rho) {
    for (int idx : alpha_list_) { alpha_[idx] = 0.0; alpha_mark_[idx] = 0; }
    alpha_list_.clear();
    for (int i = 0; i < m_; ++i) {
      double r = rho[i];
      if (r == 0.0) continue;
      for (int k = rs_[i]; k < rs_[i + 1]; ++k) {
        int j = rc_[k];
        if (!alpha_mark_[j]) { alpha_mark_[j] = 1; alpha_list_.push_back(j); }
        alpha_[j] += r * rv_[k];
      }
      int s = nstruct_ + i;
      if (!alpha_mark_[s]) { alpha_mark_[s] = 1; alpha_list_.push_back(s); }
      alpha_[s] += r;
    }
  }

  bool out_of_time() {
    return deadline_set_ && (iterations_ % 128 == 0) &&
           std::chrono::steady_clock::now() > deadline_;
  }

  // ---- phase 1 --------------------------------------------------------

  double infeasibility(std::vector<double>* slot_cost) {
    double total = 0.0;
    if (slot_cost) slot_cost->assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      int var = basis_[i];
      double v = xb_[i];
      if (v < lo_[var] - feastol()) {
        total += lo_[var] - v;
        if (slot_cost) (*slot_cost)[i] = -1.0;
      } else if (v > up_[var] + feastol()) {
        total += v - up_[var];
        if (slot_cost) (*slot_cost)[i] = 1.0;
      }
    }
    return total;
  }

  RunState phase1(long limit) {
    std::vector<double> slot_cost(m_), y(m_), d1(ntot_);
    int stall = 0;
    while (true) {
      if (iterations_ >= limit) return RunState::iteration_limit;
      if (out_of_time()) return RunState::time_limit;
      if (lu_.eta_count() >= kRefactorEvery && !refactor()) return RunState::numerical;

      double infeas = infeasibility(&slot_cost);
      if (infeas == 0.0) return RunState::done;

      compute_duals_and_d(slot_cost, nullptr, y, d1);
      // Here d1[j] is the rate of change of total infeasibility per unit
      // increase of x_j (basic variables move along -B^-1 a_j).
      int q = -1;
      double best = 0.0;
      int sigma = 1;
      bool banned_improving = false;
      for (int j = 0; j < ntot_; ++j) {
        if (vstat_[j] == kBasic || lo_[j] == up_[j]) continue;
        double dj = d1[j];
        bool can_up = vstat_[j] == kAtLower || vstat_[j] == kNonbasicFree;
        bool can_down = vstat_[j] == kAtUpper || vstat_[j] == kNonbasicFree;
        bool improving = (can_up && -dj > dualtol()) || (can_down && dj > dualtol());
        if (improving && ban_until_[j] > iterations_) { banned_improving = true; continue; }
        if (can_up && -dj > best) { best = -dj; q = j; sigma = 1; }
        if (can_down && dj > best) { best = dj; q = j; sigma = -1; }
      }
      if (q < 0 || best <= dualtol()) {
        if (banned_improving) {
          if (++ban_clears_ > 50) return RunState::numerical;
          std::fill(ban_until_.begin(), ban_until_.end(), 0L);
          continue;
        }
        // No direction reduces the infeasibility sum.
        return infeas <= feastol() * (1.0 + m_) ? RunState::done : RunState::infeasible;
      }

      load_column(q);
      // Long-step ratio test: march through slope-change events until the
      // infeasibility stops decreasing.
      struct Event {
        double theta;
        double gain;
        int slot;     // -1 = entering variable reaches its opposite bound
        int at_upper; // bound the blocking variable lands on
      };
      std::vector<Event> events;
      for (int i = 0; i < m_; ++i) {
        double delta = -sigma * col_w_[i];
        if (std::fabs(delta) < kRatioTol) continue;
        int var = basis_[i];
        double v = xb_[i];
        double lob = lo_[var], upb = up_[var];
        if (delta > 0.0) {
          if (v < lob - feastol()) {
            events.push_back({(lob - v) / delta, delta, i, 0});
            if (std::isfinite(upb)) events.push_back({(upb - v) / delta, delta, i, 1});
          } else if (std::isfinite(upb)) {
            events.push_back({std::max(0.0, (upb - v) / delta), delta, i, 1});
          }
        } else {
          if (v > upb + feastol()) {
            events.push_back({(upb - v) / delta, -delta, i, 1});
            if (std::isfinite(lob)) events.push_back({(lob - v) / delta, -delta, i, 0});
          } else if (std::isfinite(lob)) {
            events.push_back({std::max(0.0, (lob - v) / delta), -delta, i, 0});
          }
        }
      }
      double flip_range = up_[q] - lo_[q];
      bool flip_possible = std::isfinite(flip_range) && vstat_[q] != kNonbasicFree;
      if (flip_possible) events.push_back({flip_range, kInf, -1, 0});
      if (events.empty()) return RunState::numerical;  // d said improve, column says free fall

      std::sort(events.begin(), events.end(),
                [](const Event& a, const Event& b) { return a.theta < b.theta; });
      double slope = -best;
      size_t stop = events.size();
      for (size_t e = 0; e < events.size(); ++e) {
        slope += events[e].gain;
        if (slope >= 0.0) { stop = e; break; }
      }
      if (stop == events.size()) stop = events.size() - 1;  // take the last event
      const Event& ev = events[stop];
      double theta = std::max(0.0, ev.theta);

      ++iterations_;
      if (ev.slot >= 0 && !pivot_acceptable(col_w_[ev.slot])) {
        if (register_rejection(q)) return RunState::numerical;
        if (!refactor()) return RunState::numerical;
        continue;
      }
      pivot_rejections_ = 0;
      last_rejected_q_ = -1;
      if (theta <= 1e-12) { if (++stall > 4 * m_ + 1000) return RunState::numerical; }
      else stall = 0;

      apply_step(q, sigma, theta, ev.slot, ev.at_upper);
    }
  }

  // ---- phase 2 --------------------------------------------------------

  RunState phase2(long limit) {
    std::vector<double> slot_cost(m_), y(m_);
    auto recompute_d = [&]() {
      for (int i = 0; i < m_; ++i) slot_cost[i] = pricing_cost_[basis_[i]];
      compute_duals_and_d(slot_cost, &pricing_cost_, y, d_);
    };
    recompute_d();
    std::fill(devex_.begin(), devex_.end(), 1.0);
    int stall = 0;
    bool bland = false;

    while (true) {
      if (iterations_ >= limit) return RunState::iteration_limit;
      if (out_of_time()) return RunState::time_limit;
      if (lu_.eta_count() >= kRefactorEvery) {
        if (!refactor()) return RunState::numerical;
        recompute_d();
      }

      int q = -1;
      double best_score = 0.0;
      int sigma = 1;
      bool banned_improving = false;
      for (int j = 0; j < ntot_; ++j) {
        if (vstat_[j] == kBasic || lo_[j] == up_[j]) continue;
        double dj = d_[j];
        bool can_up = vstat_[j] == kAtLower || vstat_[j] == kNonbasicFree;
        bool can_down = vstat_[j] == kAtUpper || vstat_[j] == kNonbasicFree;
        bool improving = (can_up && dj < -dualtol()) || (can_down && dj > dualtol());
        if (!improving) continue;
        if (ban_until_[j] > iterations_) { banned_improving = true; continue; }
        if (bland) { q = j; sigma = dj < 0.0 ? 1 : -1; break; }
        double score = dj * dj / devex_[j];
        if (score > best_score) { best_score = score; q = j; sigma = dj < 0.0 ? 1 : -1; }
      }
      if (q < 0) {
        if (!banned_improving) return RunState::done;  // optimal
        // Only banned candidates remain; lift the bans and re-price.
        if (++ban_clears_ > 50) return RunState::numerical;
        std::fill(ban_until_.begin(), ban_until_.end(), 0L);
        if (!refactor()) return RunState::numerical;
        recompute_d();
        continue;
      }

      load_column(q);

      // Two-pass Harris ratio test.
      double limit_theta = kInf;
      bool flip_possible = std::isfinite(up_[q] - lo_[q]) && vstat_[q] != kNonbasicFree;
      if (flip_possible) limit_theta = up_[q] - lo_[q];

      double theta_relaxed = limit_theta;
      for (int i = 0; i < m_; ++i) {
        double delta = -sigma * col_w_[i];
        if (std::fabs(delta) < kRatioTol) continue;
        int var = basis_[i];
        if (delta > 0.0 && std::isfinite(up_[var]))
          theta_relaxed = std::min(theta_relaxed, (up_[var] + feastol() - xb_[i]) / delta);
        else if (delta < 0.0 && std::isfinite(lo_[var]))
          theta_relaxed = std::min(theta_relaxed, (lo_[var] - feastol() - xb_[i]) / delta);
      }
      if (theta_relaxed == kInf) return RunState::unbounded;

      int leave = -1, at_upper = 0;
      double theta = limit_theta;
      double best_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        double delta = -sigma * col_w_[i];
        if (std::fabs(delta) < kRatioTol) continue;
        int var = basis_[i];
        double ti;
        int bound;
        if (delta > 0.0) {
          if (!std::isfinite(up_[var])) continue;
          ti = (up_[var] - xb_[i]) / delta;
          bound = 1;
        } else {
          if (!std::isfinite(lo_[var])) continue;
          ti = (lo_[var] - xb_[i]) / delta;
          bound = 0;
        }
        if (ti > theta_relaxed) continue;
        double piv = std::fabs(delta);
        if (leave < 0 || piv > best_piv) { leave = i; best_piv = piv; theta = ti; at_upper = bound; }
      }
      if (leave < 0 && !flip_possible) return RunState::unbounded;
      if (leave >= 0) theta = std::max(0.0, theta);

      ++iterations_;
      if (theta <= 1e-12 && leave >= 0) {
        ++stall;
        // Long degenerate runs let the incrementally updated reduced costs
        // drift, which defeats Bland's rule; refresh them periodically.
        if (stall % 256 == 0) {
          if (!refactor()) return RunState::numerical;
          recompute_d();
          std::fill(devex_.begin(), devex_.end(), 1.0);
        }
        if (stall > 2000) bland = true;
        if (stall > 4 * m_ + 5000) return RunState::numerical;
      } else {
        stall = 0;
        bland = false;
      }

      if (leave < 0) {
        apply_step(q, sigma, limit_theta, -1, 0);  // bound flip; d unchanged
        continue;
      }

      // Pivot row (for reduced-cost and Devex updates).
      double alpha_q = col_w_[leave];
      if (!pivot_acceptable(alpha_q)) {
        if (register_rejection(q)) return RunState::numerical;
        if (!refactor()) return RunState::numerical;
        recompute_d();
        continue;  // retry with a fresh factorization, or banned if repeated
      }
      pivot_rejections_ = 0;
      last_rejected_q_ = -1;
      for (int i = 0; i < m_; ++i) work_slot_[i] = 0.0;
      work_slot_[leave] = 1.0;
      lu_.btran(work_slot_, rho_);
      compute_pivot_row(rho_);

      int leaving_var = basis_[leave];
      double dq = d_[q];
      double ratio = dq / alpha_q;
      double wq = devex_[q];
      for (int j : alpha_list_) {
        if (vstat_[j] == kBasic || j == q) continue;
        double aj = alpha_[j];
        if (aj == 0.0) continue;
        d_[j] -= ratio * aj;
        double cand = (aj / alpha_q) * (aj / alpha_q) * wq;
        if (cand > devex_[j]) devex_[j] = cand;
      }
      d_[leaving_var] = -ratio;
      d_[q] = 0.0;
      devex_[leaving_var] = std::max(wq / (alpha_q * alpha_q), 1.0);
      if (devex_[leaving_var] > 1e10) std::fill(devex_.begin(), devex_.end(), 1.0);

      apply_step(q, sigma, theta, leave, at_upper);
    }
  }

  // Moves entering variable q by sigma*theta; `leave` < 0 means bound flip.
  void apply_step(int q, int sigma, double theta, int leave, int at_upper) {
    double entering_value = nb_value(q) + sigma * theta;
    if (theta != 0.0)
      for (int i = 0; i < m_; ++i) xb_[i] -= sigma * theta * col_w_[i];
    if (leave < 0) {
      if (vstat_[q] == kAtLower) vstat_[q] = kAtUpper;
      else if (vstat_[q] == kAtUpper) vstat_[q] = kAtLower;
      return;
    }
    int leaving_var = basis_[leave];
    vstat_[leaving_var] = lo_[leaving_var] == up_[leaving_var] ? kAtLower
                          : (at_upper ? kAtUpper : kAtLower);
    slot_of_[leaving_var] = -1;
    basis_[leave] = q;
    slot_of_[q] = leave;
    vstat_[q] = kBasic;
    xb_[leave] = entering_value;
    lu_.append_eta(col_w_, leave);
  }

  // ---- wrap-up --------------------------------------------------------

  RawSolution fail(const std::string& message) {
    RawSolution out;
    out.status = SolveStatus::numerical_failure;
    out.iterations = iterations_;
    out.message = message;
    return out;
  }

  RawSolution state_result(RunState state, const std::string& where) {
    RawSolution out;
    out.iterations = iterations_;
    switch (state) {
      case RunState::infeasible:
        out.status = SolveStatus::infeasible;
        out.message = "no feasible point (" + where + ")";
        break;
      case RunState::unbounded:
        out.status = SolveStatus::unbounded;
        out.message = "objective unbounded below (" + where + ")";
        break;
      case RunState::iteration_limit:
        out.status = SolveStatus::numerical_failure;
        out.message = "iteration limit reached in " + where + " after " +
                      std::to_string(iterations_) + " iterations";
        break;
      case RunState::time_limit:
        out.status = SolveStatus::numerical_failure;
        out.message = "time limit reached in " + where;
        break;
      default:
        out.status = SolveStatus::numerical_failure;
        out.message = "numerical trouble in " + where;
        break;
    }
    return out;
  }

  RawSolution finalize() {
    if (!refactor()) return fail("final refactorization failed");

    RawSolution out;
    out.status = SolveStatus::optimal;
    out.iterations = iterations_;
    out.variable_values.assign(nstruct_, 0.0);
    std::vector<double> full(ntot_, 0.0);
    for (int j = 0; j < ntot_; ++j)
      if (vstat_[j] != kBasic) full[j] = nb_value(j);
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    for (int j = 0; j < nstruct_; ++j) out.variable_values[j] = full[j];

    double obj = 0.0;
    for (int j = 0; j < nstruct_; ++j) obj += cost_[j] * full[j];
    out.objective = obj;

    std::vector<double> slot_cost(m_), y(m_), d(ntot_);
    for (int i = 0; i < m_; ++i) slot_cost[i] = cost_[basis_[i]];
    compute_duals_and_d(slot_cost, &cost_, y, d);
    out.row_duals = y;
    out.reduced_costs.assign(d.begin(), d.begin() + nstruct_);
    return out;
  }
};

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(feasibility_tolerance > 0.0) || !(optimality_tolerance > 0.0))
    throw InvalidInput("solver tolerances must be positive");
  if (backend != "bundled" && backend != "external")
    throw ConfigError("unknown solver backend '" + backend + "'");
}

RawSolution solve_bundled(const LpProblem& problem, const SolverConfig& config) {
  config.validate();
  SimplexSolver solver(problem, config);
  return solver.run();
}

}  // namespace billopt
