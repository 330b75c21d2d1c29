#include "rd/linsolve.hpp"

#include <algorithm>

namespace rd {

void LinearSystem::add_equation(Row row, ParamExpr rhs)
{
    for (auto it = row.begin(); it != row.end();) {
        it = sgn(it->second) == 0 ? row.erase(it) : std::next(it);
    }
    // Pivot rows are fully reduced, so one pass over the pivot columns suffices.
    std::vector<int> hits;
    for (const auto& [col, v] : row) {
        if (pivots_.count(col)) {
            hits.push_back(col);
        }
    }
    for (int col : hits) {
        const Rational factor = row[col];
        const Pivot& p = pivots_.at(col);
        for (const auto& [c, v] : p.row) {
            Rational& target = row[c];
            target -= factor * v;
            if (sgn(target) == 0) {
                row.erase(c);
            }
        }
        rhs -= p.rhs * factor;
    }
    if (row.empty()) {
        if (!rhs.is_zero()) {
            conditions_.push_back(std::move(rhs));
        }
        return;
    }
    const int col = row.begin()->first;
    const Rational lead = row.begin()->second;
    for (auto& [c, v] : row) {
        v /= lead;
    }
    rhs /= lead;
    for (auto& [pc, p] : pivots_) {
        auto hit = p.row.find(col);
        if (hit == p.row.end()) {
            continue;
        }
        const Rational factor = hit->second;
        for (const auto& [c, v] : row) {
            Rational& target = p.row[c];
            target -= factor * v;
            if (sgn(target) == 0) {
                p.row.erase(c);
            }
        }
        p.rhs -= rhs * factor;
    }
    pivots_.emplace(col, Pivot{std::move(row), std::move(rhs)});
}

bool LinearSystem::Solution::consistent() const
{
    return std::none_of(conditions.begin(), conditions.end(), [](const ParamExpr& r) { return r.is_numeric(); });
}

LinearSystem::Solution LinearSystem::solve() const
{
    Solution s;
    s.values.assign(static_cast<std::size_t>(unknowns_), ParamExpr());
    for (int c = 0; c < unknowns_; ++c) {
        auto it = pivots_.find(c);
        if (it == pivots_.end()) {
            s.free_columns.push_back(c);
        } else {
            s.values[c] = it->second.rhs;
        }
    }
    s.determined.assign(static_cast<std::size_t>(unknowns_), false);
    for (const auto& [c, p] : pivots_) {
        s.determined[c] = p.row.size() == 1;
    }
    s.conditions = conditions_;
    return s;
}

std::vector<std::pair<LinearSystem::Row, ParamExpr>> LinearSystem::reduced_rows() const
{
    std::vector<std::pair<Row, ParamExpr>> out;
    for (const auto& [c, p] : pivots_) {
        out.emplace_back(p.row, p.rhs);
    }
    return out;
}

} // namespace rd
