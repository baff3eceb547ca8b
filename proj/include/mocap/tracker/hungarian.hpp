#pragma once

#include <Eigen/Core>

#include <vector>

namespace mocap::tracking {

/// Result of a rectangular min-cost assignment. `row_to_col[i]` is the column
/// matched to row i, or -1. Exactly min(rows, cols) rows are matched.
struct Assignment {
    std::vector<int> row_to_col;
    double total_cost = 0.0;  // summed over rows in ascending row order
};

/// Hungarian (shortest augmenting path with potentials) on a dense cost
/// matrix. Costs must be finite.
Assignment hungarian(const Eigen::MatrixXd& cost);

/// Minimum-cost assignment, ties broken toward the lexicographically smallest
/// pairing: rows in ascending order each take the smallest column (unmatched
/// last) that still admits an optimal completion. Instances above
/// `kTieBreakMaxCells` cells skip tie refinement and return hungarian().
Assignment min_cost_assignment(const Eigen::MatrixXd& cost);

inline constexpr Eigen::Index kTieBreakMaxCells = 256;

/// Sum of cost(i, row_to_col[i]) over matched rows, ascending row order.
double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& row_to_col);

} // namespace mocap::tracking
