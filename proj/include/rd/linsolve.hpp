#pragma once

// Exact Gauss-Jordan elimination for systems A x = b with a rational matrix and a right-hand
// side affine in named parameters.

#include <map>
#include <vector>

#include "rd/exactmath.hpp"

namespace rd {

class LinearSystem {
public:
    using Row = std::map<int, Rational>;

    explicit LinearSystem(int unknowns) : unknowns_(unknowns) {}

    int unknowns() const noexcept { return unknowns_; }

    // row . x = rhs; the row is reduced against earlier pivots immediately.
    void add_equation(Row row, ParamExpr rhs);

    struct Solution {
        std::vector<ParamExpr> values; // free unknowns are set to zero
        std::vector<int> free_columns;
        // True for pivots whose reduced row avoids every free column: the value is forced.
        std::vector<bool> determined;
        // Each entry r stands for the condition 0 = r left over after elimination.
        std::vector<ParamExpr> conditions;
        // False when some condition is a nonzero number.
        bool consistent() const;
    };

    Solution solve() const;

    // The reduced pivot rows (pivot entry 1), one per independent equation.
    std::vector<std::pair<Row, ParamExpr>> reduced_rows() const;

private:
    struct Pivot {
        Row row;
        ParamExpr rhs;
    };
    int unknowns_;
    std::map<int, Pivot> pivots_; // keyed by pivot column
    std::vector<ParamExpr> conditions_;
};

} // namespace rd
