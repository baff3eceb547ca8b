#include "mocap/tracker/hungarian.hpp"

#include <limits>
#include <stdexcept>

namespace mocap::tracking {

namespace {

// Classic O(n^2 m) potentials formulation; requires rows <= cols.
std::vector<int> solve_rows_le_cols(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based arrays; column 0 is the virtual source.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    return row_to_col;
}

// Optimal completion with some rows pinned to a column (>= 0) or to
// "unmatched" (-1); entries of -2 are free.
Assignment solve_pinned(const Eigen::MatrixXd& cost, const std::vector<int>& pinned) {
    const Eigen::Index rows = cost.rows();
    const Eigen::Index cols = cost.cols();
    std::vector<char> col_taken(cols, 0);
    std::vector<Eigen::Index> free_rows;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (pinned[i] >= 0) {
            col_taken[pinned[i]] = 1;
        } else if (pinned[i] == -2) {
            free_rows.push_back(i);
        }
    }
    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (!col_taken[j]) free_cols.push_back(j);
    }

    Assignment out;
    out.row_to_col.assign(rows, -1);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (pinned[i] >= 0) out.row_to_col[i] = pinned[i];
    }
    if (!free_rows.empty() && !free_cols.empty()) {
        Eigen::MatrixXd sub(free_rows.size(), free_cols.size());
        for (std::size_t r = 0; r < free_rows.size(); ++r) {
            for (std::size_t c = 0; c < free_cols.size(); ++c) {
                sub(r, c) = cost(free_rows[r], free_cols[c]);
            }
        }
        const Assignment inner = hungarian(sub);
        for (std::size_t r = 0; r < free_rows.size(); ++r) {
            if (inner.row_to_col[r] >= 0) {
                out.row_to_col[free_rows[r]] = static_cast<int>(free_cols[inner.row_to_col[r]]);
            }
        }
    }
    out.total_cost = assignment_cost(cost, out.row_to_col);
    return out;
}

int matched_count(const std::vector<int>& row_to_col) {
    int n = 0;
    for (int c : row_to_col) n += c >= 0;
    return n;
}

} // namespace

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& row_to_col) {
    double total = 0.0;
    for (std::size_t i = 0; i < row_to_col.size(); ++i) {
        if (row_to_col[i] >= 0) {
            total += cost(static_cast<Eigen::Index>(i), row_to_col[i]);
        }
    }
    return total;
}

Assignment hungarian(const Eigen::MatrixXd& cost) {
    if (!cost.allFinite()) {
        throw std::invalid_argument("assignment costs must be finite");
    }
    Assignment out;
    out.row_to_col.assign(cost.rows(), -1);
    if (cost.rows() == 0 || cost.cols() == 0) {
        return out;
    }
    if (cost.rows() <= cost.cols()) {
        out.row_to_col = solve_rows_le_cols(cost);
    } else {
        const Eigen::MatrixXd t = cost.transpose();
        const std::vector<int> col_to_row = solve_rows_le_cols(t);
        for (std::size_t j = 0; j < col_to_row.size(); ++j) {
            if (col_to_row[j] >= 0) {
                out.row_to_col[col_to_row[j]] = static_cast<int>(j);
            }
        }
    }
    out.total_cost = assignment_cost(cost, out.row_to_col);
    return out;
}

Assignment min_cost_assignment(const Eigen::MatrixXd& cost) {
    Assignment best = hungarian(cost);
    if (cost.size() == 0 || cost.size() > kTieBreakMaxCells) {
        return best;
    }
    const Eigen::Index rows = cost.rows();
    const int target = matched_count(best.row_to_col);
    std::vector<int> pinned(rows, -2);

    for (Eigen::Index i = 0; i < rows; ++i) {
        const int current = best.row_to_col[i];
        std::vector<int> candidates;
        for (int j = 0; j < cost.cols(); ++j) candidates.push_back(j);
        candidates.push_back(-1);
        for (const int cand : candidates) {
            if (cand == current) {
                break;
            }
            if (cand >= 0) {
                bool taken = false;
                for (Eigen::Index r = 0; r < i; ++r) taken |= pinned[r] == cand;
                if (taken) continue;
            }
            std::vector<int> trial = pinned;
            trial[i] = cand;
            const Assignment alt = solve_pinned(cost, trial);
            if (matched_count(alt.row_to_col) == target && alt.total_cost <= best.total_cost) {
                best = alt;
                break;
            }
        }
        pinned[i] = best.row_to_col[i];
    }
    return best;
}

} // namespace mocap::tracking
