#include "orcd/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace orcd {

bool lp_feasible(int num_vars, const std::vector<LpRow>& rows, double tol) {
    const std::size_t m = rows.size();
    if (m == 0) return true;

    // Columns: original vars, one surplus per >= row, one artificial per row.
    std::size_t num_surplus = 0;
    for (const auto& r : rows)
        if (!r.is_equality) ++num_surplus;
    const std::size_t n = static_cast<std::size_t>(num_vars) + num_surplus + m;
    const std::size_t width = n + 1;  // + RHS

    std::vector<double> tab(m * width, 0.0);
    std::vector<int> basis(m);

    std::size_t surplus_at = static_cast<std::size_t>(num_vars);
    for (std::size_t r = 0; r < m; ++r) {
        double* row = &tab[r * width];
        for (const auto& [v, c] : rows[r].terms) {
            if (v < 0 || v >= num_vars) throw std::invalid_argument("lp_feasible: bad variable index");
            row[v] += c;
        }
        row[n] = rows[r].rhs;
        if (!rows[r].is_equality) row[surplus_at++] = -1.0;
        if (row[n] < 0.0)
            for (std::size_t j = 0; j <= n; ++j) row[j] = -row[j];
        const std::size_t art = static_cast<std::size_t>(num_vars) + num_surplus + r;
        row[art] = 1.0;
        basis[r] = static_cast<int>(art);
    }

    // Phase-1 objective: minimize the artificial sum. With artificials basic,
    // the reduced-cost row is the column-wise sum of all constraint rows over
    // the non-artificial columns.
    const std::size_t first_art = static_cast<std::size_t>(num_vars) + num_surplus;
    std::vector<double> obj(width, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j <= n; ++j)
            if (j < first_art || j == n) obj[j] += tab[r * width + j];

    while (true) {
        // Bland: lowest-index improving non-artificial column.
        std::size_t pivot_col = n;
        for (std::size_t j = 0; j < first_art; ++j) {
            if (obj[j] > tol) {
                pivot_col = j;
                break;
            }
        }
        if (pivot_col == n) break;

        std::size_t pivot_row = m;
        double best_ratio = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double a = tab[r * width + pivot_col];
            if (a <= tol) continue;
            const double ratio = tab[r * width + n] / a;
            if (pivot_row == m || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[pivot_row])) {
                pivot_row = r;
                best_ratio = ratio;
            }
        }
        if (pivot_row == m) break;  // unbounded direction cannot raise feasibility

        double* prow = &tab[pivot_row * width];
        const double pivot = prow[pivot_col];
        for (std::size_t j = 0; j <= n; ++j) prow[j] /= pivot;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == pivot_row) continue;
            double* row = &tab[r * width];
            const double factor = row[pivot_col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= n; ++j) row[j] -= factor * prow[j];
        }
        const double ofactor = obj[pivot_col];
        if (ofactor != 0.0)
            for (std::size_t j = 0; j <= n; ++j) obj[j] -= ofactor * prow[j];
        basis[pivot_row] = static_cast<int>(pivot_col);
    }

    // Residual infeasibility = value of the artificial sum.
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] >= static_cast<int>(first_art)) infeasibility += tab[r * width + n];
    return infeasibility <= tol * (1.0 + std::abs(infeasibility));
}

}  // namespace orcd
