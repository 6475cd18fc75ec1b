#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace orcd {

/// One linear constraint over nonnegative variables.
struct LpRow {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    double rhs = 0.0;
    bool is_equality = true;  // false: sum >= rhs
};

/// Phase-1 dense simplex (Bland's rule): reports whether
///   { x >= 0 : equality and >= rows all satisfied }
/// is non-empty.
bool lp_feasible(int num_vars, const std::vector<LpRow>& rows, double tol = 1e-9);

}  // namespace orcd
