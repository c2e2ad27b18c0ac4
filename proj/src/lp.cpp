#include "ries/lp.hpp"

#include <algorithm>
#include <cmath>

#include "ries/common.hpp"

namespace ries::lp {

std::string status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterLimit: return "iteration-limit";
  }
  return "?";
}

int Model::add_col(const std::string& name, double lo_v, double hi_v, double cost_v) {
  col_name.push_back(name);
  lo.push_back(lo_v);
  hi.push_back(hi_v);
  cost.push_back(cost_v);
  return num_cols() - 1;
}

int Model::add_row(const std::string& name, Sense s, double rhs,
                   std::vector<std::pair<int, double>> coef) {
  RowDef r;
  r.name = name;
  r.sense = s;
  r.rhs = rhs;
  r.coef = std::move(coef);
  rows.push_back(std::move(r));
  return num_rows() - 1;
}

void Model::validate() const {
  for (int j = 0; j < num_cols(); ++j) {
    size_t k = static_cast<size_t>(j);
    if (lo[k] > hi[k])
      throw DataError("lp: column " + col_name[k] + " has lo > hi");
    if (!std::isfinite(cost[k]))
      throw DataError("lp: column " + col_name[k] + " has non-finite cost");
  }
  for (const auto& r : rows) {
    if (!std::isfinite(r.rhs)) throw DataError("lp: row " + r.name + " has non-finite rhs");
    for (auto [j, a] : r.coef) {
      if (j < 0 || j >= num_cols())
        throw DataError("lp: row " + r.name + " references bad column");
      if (!std::isfinite(a))
        throw DataError("lp: row " + r.name + " has non-finite coefficient");
    }
  }
}

namespace {

enum class VStat { Basic, AtLo, AtHi, AtZero };  // AtZero: nonbasic free at 0

struct Work {
  // Column-major sparse matrix over structural + slack + artificial columns.
  int n = 0, m = 0;                    // structural cols, rows
  int n_total = 0;                     // n + 2m
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> lo, hi, c2;      // bounds and phase-2 costs
  std::vector<double> b;               // rhs
  std::vector<double> val;             // current value per column
  std::vector<VStat> stat;
  std::vector<int> basis;              // column basic at each row position
  Eigen::MatrixXd binv;
  bool bland = false;
  int degen_streak = 0;

  int slack(int i) const { return n + i; }
  int artificial(int i) const { return n + m + i; }
};

double nb_rest_value(const Work& w, int j) {
  switch (w.stat[static_cast<size_t>(j)]) {
    case VStat::AtLo: return w.lo[static_cast<size_t>(j)];
    case VStat::AtHi: return w.hi[static_cast<size_t>(j)];
    default: return 0.0;
  }
}

// Recompute basis inverse and basic values from scratch.
void refactorize(Work& w) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(w.m, w.m);
  for (int p = 0; p < w.m; ++p)
    for (auto [i, a] : w.cols[static_cast<size_t>(w.basis[static_cast<size_t>(p)])])
      B(i, p) = a;
  w.binv = B.partialPivLu().inverse();

  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(w.b.data(), w.m);
  for (int j = 0; j < w.n_total; ++j) {
    if (w.stat[static_cast<size_t>(j)] == VStat::Basic) continue;
    double v = nb_rest_value(w, j);
    w.val[static_cast<size_t>(j)] = v;
    if (v != 0.0)
      for (auto [i, a] : w.cols[static_cast<size_t>(j)]) r(i) -= a * v;
  }
  Eigen::VectorXd xb = w.binv * r;
  for (int p = 0; p < w.m; ++p) w.val[static_cast<size_t>(w.basis[static_cast<size_t>(p)])] = xb(p);
}

// One simplex phase over the given cost vector. Returns final status
// (Optimal = no improving column).
Status run_phase(Work& w, const std::vector<double>& cost, const SolveOptions& opt,
                 int& iters, int max_iters) {
  const double inf = kInf;
  int since_refactor = 0;

  while (iters < max_iters) {
    // y = binv' * c_B
    Eigen::VectorXd cb(w.m);
    for (int p = 0; p < w.m; ++p) cb(p) = cost[static_cast<size_t>(w.basis[static_cast<size_t>(p)])];
    Eigen::VectorXd y = w.binv.transpose() * cb;

    // price nonbasic columns
    int enter = -1, dir = 0;
    double best = opt.tol_dual;
    for (int j = 0; j < w.n_total; ++j) {
      size_t k = static_cast<size_t>(j);
      if (w.stat[k] == VStat::Basic) continue;
      if (w.lo[k] == w.hi[k]) continue;  // fixed
      double d = cost[k];
      for (auto [i, a] : w.cols[k]) d -= y(i) * a;
      int cand_dir = 0;
      if ((w.stat[k] == VStat::AtLo || w.stat[k] == VStat::AtZero) && d < -best)
        cand_dir = +1;
      else if ((w.stat[k] == VStat::AtHi || w.stat[k] == VStat::AtZero) && d > best)
        cand_dir = -1;
      if (cand_dir != 0) {
        if (w.bland) {  // first eligible index
          enter = j;
          dir = cand_dir;
          break;
        }
        best = std::abs(d);
        enter = j;
        dir = cand_dir;
      }
    }
    if (enter < 0) return Status::Optimal;

    // direction through the basis
    Eigen::VectorXd wcol = Eigen::VectorXd::Zero(w.m);
    for (auto [i, a] : w.cols[static_cast<size_t>(enter)]) wcol += a * w.binv.col(i);

    // ratio test: entering moves by t >= 0 in direction dir
    size_t ke = static_cast<size_t>(enter);
    double range = w.hi[ke] - w.lo[ke];  // may be inf
    double t_best = range;
    int leave = -1;      // basis position
    int leave_side = 0;  // -1: leaving hits lo, +1: hits hi
    double piv_best = 0.0;
    for (int p = 0; p < w.m; ++p) {
      double delta = dir * wcol(p);  // basic p changes by -delta * t
      if (std::abs(delta) <= opt.tol_pivot) continue;
      size_t kb = static_cast<size_t>(w.basis[static_cast<size_t>(p)]);
      double t_p, side;
      if (delta > 0) {  // basic decreases toward lo
        if (w.lo[kb] == -inf) continue;
        t_p = (w.val[kb] - w.lo[kb]) / delta;
        side = -1;
      } else {  // basic increases toward hi
        if (w.hi[kb] == inf) continue;
        t_p = (w.val[kb] - w.hi[kb]) / delta;
        side = +1;
      }
      if (t_p < 0) t_p = 0;  // tolerate small bound drift
      bool better = t_p < t_best - 1e-12;
      // on ties prefer the larger pivot magnitude for stability (or the
      // lowest column index in Bland mode)
      bool tie = std::abs(t_p - t_best) <= 1e-12 && leave >= 0;
      if (tie) {
        if (w.bland)
          better = w.basis[static_cast<size_t>(p)] < w.basis[static_cast<size_t>(leave)];
        else
          better = std::abs(delta) > std::abs(piv_best);
      }
      if (better) {
        t_best = t_p;
        leave = p;
        leave_side = static_cast<int>(side);
        piv_best = delta;
      }
    }

    if (t_best == inf) return Status::Unbounded;

    // track degeneracy; switch to Bland on long degenerate runs
    if (t_best <= 1e-12) {
      if (++w.degen_streak > 2 * w.m + 50) w.bland = true;
    } else {
      w.degen_streak = 0;
      w.bland = false;
    }

    // apply the step
    if (t_best > 0) {
      for (int p = 0; p < w.m; ++p) {
        size_t kb = static_cast<size_t>(w.basis[static_cast<size_t>(p)]);
        w.val[kb] -= dir * t_best * wcol(p);
      }
      w.val[ke] += dir * t_best;
    }

    if (leave < 0) {
      // bound flip: entering traversed its whole range
      w.stat[ke] = dir > 0 ? VStat::AtHi : VStat::AtLo;
      w.val[ke] = dir > 0 ? w.hi[ke] : w.lo[ke];
    } else {
      size_t kl = static_cast<size_t>(w.basis[static_cast<size_t>(leave)]);
      w.stat[kl] = leave_side < 0 ? VStat::AtLo : VStat::AtHi;
      if (w.lo[kl] == -inf && w.hi[kl] == inf) w.stat[kl] = VStat::AtZero;
      w.val[kl] = nb_rest_value(w, static_cast<int>(kl));
      w.basis[static_cast<size_t>(leave)] = enter;
      w.stat[ke] = VStat::Basic;

      // elementary update of binv
      double piv = wcol(leave);
      w.binv.row(leave) /= piv;
      for (int i = 0; i < w.m; ++i) {
        if (i == leave) continue;
        double f = wcol(i);
        if (f != 0.0) w.binv.row(i) -= f * w.binv.row(leave);
      }
      if (++since_refactor >= opt.refactor_every) {
        refactorize(w);
        since_refactor = 0;
      }
    }
    ++iters;
  }
  return Status::IterLimit;
}

// Full recompute of a_i . x over all columns (slacks included) vs b.
double max_row_residual(const Work& w) {
  double worst = 0.0;
  Eigen::VectorXd act = Eigen::VectorXd::Zero(w.m);
  for (int j = 0; j < w.n_total; ++j)
    for (auto [i, a] : w.cols[static_cast<size_t>(j)])
      act(i) += a * w.val[static_cast<size_t>(j)];
  for (int i = 0; i < w.m; ++i)
    worst = std::max(worst, std::abs(act(i) - w.b[static_cast<size_t>(i)]));
  return worst;
}

}  // namespace

Solution solve(const Model& model, const SolveOptions& opt) {
  model.validate();
  Work w;
  w.n = model.num_cols();
  w.m = model.num_rows();
  w.n_total = w.n + 2 * w.m;
  w.cols.resize(static_cast<size_t>(w.n_total));
  w.lo.resize(static_cast<size_t>(w.n_total));
  w.hi.resize(static_cast<size_t>(w.n_total));
  w.c2.assign(static_cast<size_t>(w.n_total), 0.0);
  w.b.resize(static_cast<size_t>(w.m));
  w.val.assign(static_cast<size_t>(w.n_total), 0.0);
  w.stat.assign(static_cast<size_t>(w.n_total), VStat::AtLo);

  for (int j = 0; j < w.n; ++j) {
    size_t k = static_cast<size_t>(j);
    w.lo[k] = model.lo[k];
    w.hi[k] = model.hi[k];
    w.c2[k] = model.cost[k];
  }
  for (int i = 0; i < w.m; ++i) {
    const auto& r = model.rows[static_cast<size_t>(i)];
    w.b[static_cast<size_t>(i)] = r.rhs;
    for (auto [j, a] : r.coef)
      if (a != 0.0) w.cols[static_cast<size_t>(j)].push_back({i, a});
    // slack: row becomes a.x + s = b
    size_t ks = static_cast<size_t>(w.slack(i));
    w.cols[ks] = {{i, 1.0}};
    switch (r.sense) {
      case Sense::LE: w.lo[ks] = 0; w.hi[ks] = kInf; break;
      case Sense::GE: w.lo[ks] = -kInf; w.hi[ks] = 0; break;
      case Sense::EQ: w.lo[ks] = 0; w.hi[ks] = 0; break;
    }
  }

  // initial nonbasic placement
  for (int j = 0; j < w.n + w.m; ++j) {
    size_t k = static_cast<size_t>(j);
    if (w.lo[k] > -kInf) {
      w.stat[k] = VStat::AtLo;
      w.val[k] = w.lo[k];
    } else if (w.hi[k] < kInf) {
      w.stat[k] = VStat::AtHi;
      w.val[k] = w.hi[k];
    } else {
      w.stat[k] = VStat::AtZero;
      w.val[k] = 0.0;
    }
  }

  // artificial columns sized to the initial residual
  std::vector<double> c1(static_cast<size_t>(w.n_total), 0.0);
  Eigen::VectorXd resid = Eigen::Map<const Eigen::VectorXd>(w.b.data(), w.m);
  for (int j = 0; j < w.n + w.m; ++j)
    if (w.val[static_cast<size_t>(j)] != 0.0)
      for (auto [i, a] : w.cols[static_cast<size_t>(j)])
        resid(i) -= a * w.val[static_cast<size_t>(j)];
  w.basis.resize(static_cast<size_t>(w.m));
  w.binv = Eigen::MatrixXd::Zero(w.m, w.m);
  for (int i = 0; i < w.m; ++i) {
    size_t ka = static_cast<size_t>(w.artificial(i));
    double sign = resid(i) >= 0 ? 1.0 : -1.0;
    w.cols[ka] = {{i, sign}};
    w.lo[ka] = 0;
    w.hi[ka] = kInf;
    c1[ka] = 1.0;
    w.basis[static_cast<size_t>(i)] = static_cast<int>(ka);
    w.stat[ka] = VStat::Basic;
    w.val[ka] = std::abs(resid(i));
    w.binv(i, i) = sign;  // B = diag(sign) => inverse = itself
  }

  Solution sol;
  int iters = 0;

  // ---- phase 1: drive artificial infeasibility to zero
  Status st = run_phase(w, c1, opt, iters, opt.max_iters);
  sol.phase1_iterations = iters;
  double infeas = 0.0;
  for (int i = 0; i < w.m; ++i) infeas += w.val[static_cast<size_t>(w.artificial(i))];
  if (st == Status::IterLimit || infeas > 1e-6) {
    sol.status = st == Status::IterLimit ? Status::IterLimit : Status::Infeasible;
    // report the row whose artificial is most stuck
    double worst = 0;
    for (int i = 0; i < w.m; ++i) {
      double v = w.val[static_cast<size_t>(w.artificial(i))];
      if (v > worst) {
        worst = v;
        sol.infeasible_row = i;
      }
    }
    sol.iterations = iters;
    return sol;
  }

  // pin artificials at zero; pivot basic ones out where possible
  for (int i = 0; i < w.m; ++i) {
    size_t ka = static_cast<size_t>(w.artificial(i));
    w.lo[ka] = 0;
    w.hi[ka] = 0;
    if (w.stat[ka] != VStat::Basic) w.stat[ka] = VStat::AtLo, w.val[ka] = 0;
  }
  for (int p = 0; p < w.m; ++p) {
    int jb = w.basis[static_cast<size_t>(p)];
    if (jb < w.n + w.m) continue;  // not artificial
    // degenerate pivot: bring in any real column with a nonzero in this row
    int found = -1;
    for (int j = 0; j < w.n + w.m && found < 0; ++j) {
      size_t k = static_cast<size_t>(j);
      if (w.stat[k] == VStat::Basic || w.lo[k] == w.hi[k]) continue;
      double wp = 0.0;
      for (auto [i, a] : w.cols[k]) wp += w.binv(p, i) * a;
      if (std::abs(wp) > 1e-7) found = j;
    }
    if (found < 0) continue;  // redundant row; artificial stays basic at 0
    size_t kf = static_cast<size_t>(found);
    Eigen::VectorXd wcol = Eigen::VectorXd::Zero(w.m);
    for (auto [i, a] : w.cols[kf]) wcol += a * w.binv.col(i);
    double piv = wcol(p);
    size_t ka = static_cast<size_t>(jb);
    w.stat[ka] = VStat::AtLo;
    w.val[ka] = 0;
    w.basis[static_cast<size_t>(p)] = found;
    double entering_val = w.val[kf];
    w.stat[kf] = VStat::Basic;
    w.binv.row(p) /= piv;
    for (int i = 0; i < w.m; ++i) {
      if (i == p) continue;
      double f = wcol(i);
      if (f != 0.0) w.binv.row(i) -= f * w.binv.row(p);
    }
    w.val[kf] = entering_val;  // degenerate: value unchanged
  }
  refactorize(w);
  w.bland = false;
  w.degen_streak = 0;

  // ---- phase 2
  st = run_phase(w, w.c2, opt, iters, opt.max_iters);
  sol.iterations = iters;
  if (st != Status::Optimal) {
    sol.status = st;
    return sol;
  }

  refactorize(w);  // clean values before reporting
  sol.status = Status::Optimal;
  sol.x.resize(w.n);
  for (int j = 0; j < w.n; ++j) sol.x(j) = w.val[static_cast<size_t>(j)];
  sol.obj = model.obj_const;
  for (int j = 0; j < w.n; ++j) sol.obj += model.cost[static_cast<size_t>(j)] * sol.x(j);

  sol.row_value.resize(w.m);
  for (int i = 0; i < w.m; ++i) {
    double v = 0.0;
    for (auto [j, a] : model.rows[static_cast<size_t>(i)].coef)
      v += a * sol.x(j);
    sol.row_value(i) = v;
  }
  Eigen::VectorXd cb(w.m);
  for (int p = 0; p < w.m; ++p) cb(p) = w.c2[static_cast<size_t>(w.basis[static_cast<size_t>(p)])];
  sol.dual = w.binv.transpose() * cb;
  sol.max_residual = max_row_residual(w);
  return sol;
}

}  // namespace ries::lp
