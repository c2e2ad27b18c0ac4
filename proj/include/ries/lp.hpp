#pragma once
#include <Eigen/Dense>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ries::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, GE, EQ };
enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

std::string status_name(Status s);

// Sparse LP container: min c'x + const  s.t. rows, lo <= x <= hi.
struct Model {
  std::vector<double> cost, lo, hi;
  std::vector<std::string> col_name;

  struct RowDef {
    Sense sense = Sense::EQ;
    double rhs = 0.0;
    std::string name;
    std::vector<std::pair<int, double>> coef;  // (column, value)
  };
  std::vector<RowDef> rows;
  double obj_const = 0.0;

  int add_col(const std::string& name, double lo_v, double hi_v, double cost_v = 0.0);
  int add_row(const std::string& name, Sense s, double rhs,
              std::vector<std::pair<int, double>> coef);
  int add_row(const RowDef& r) { return add_row(r.name, r.sense, r.rhs, r.coef); }
  void add_cost(int j, double c) { cost[static_cast<size_t>(j)] += c; }

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Throws DataError on malformed bounds/indices.
  void validate() const;
};

struct Solution {
  Status status = Status::IterLimit;
  Eigen::VectorXd x;          // structural column values
  double obj = 0.0;           // includes obj_const
  Eigen::VectorXd row_value;  // a_i . x per row
  Eigen::VectorXd dual;       // row multipliers at the final basis
  int iterations = 0;
  int phase1_iterations = 0;
  int infeasible_row = -1;    // best-effort culprit row when Infeasible
  double max_residual = 0.0;  // max |a_i.x + s_i - b_i| at termination
};

struct SolveOptions {
  int max_iters = 200000;
  double tol_feas = 1e-7;
  double tol_dual = 1e-9;
  double tol_pivot = 1e-9;
  int refactor_every = 80;
};

// Bounded-variable revised simplex, two-phase with artificials, dense basis
// inverse (Eigen), Dantzig pricing with a Bland fallback against cycling.
Solution solve(const Model& m, const SolveOptions& opt = {});

}  // namespace ries::lp
