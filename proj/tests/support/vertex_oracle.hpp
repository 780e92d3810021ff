#pragma once

// Brute-force LP oracle for tiny, fully bounded problems: every choice of n
// linearly independent active constraints (rows or bounds) is solved by
// Gaussian elimination, and the best feasible point wins. Independent of the
// simplex code on purpose.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mgres/lp/linear_program.hpp"

namespace oracle {

struct VertexResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> point;
};

inline bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-10) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

inline VertexResult enumerate_vertices(const mgres::lp::LinearProgram& lp, double tol = 1e-8) {
    using mgres::lp::Relation;
    const std::size_t n = lp.num_variables();
    // candidate hyperplanes: every row, then lower and upper bound of each variable
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    for (const auto& r : lp.rows()) {
        std::vector<double> a(n, 0.0);
        for (const auto& t : r.terms) a[t.var] += t.coef;
        planes.push_back(a);
        rhs.push_back(r.rhs);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (double bound : {lp.variable(j).lower, lp.variable(j).upper}) {
            std::vector<double> a(n, 0.0);
            a[j] = 1.0;
            planes.push_back(a);
            rhs.push_back(bound);
        }
    }
    auto feasible = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < lp.variable(j).lower - tol || x[j] > lp.variable(j).upper + tol) return false;
        for (const auto& r : lp.rows()) {
            double s = 0.0;
            for (const auto& t : r.terms) s += t.coef * x[t.var];
            if (r.relation == Relation::LessEqual && s > r.rhs + tol) return false;
            if (r.relation == Relation::GreaterEqual && s < r.rhs - tol) return false;
            if (r.relation == Relation::Equal && std::abs(s - r.rhs) > tol) return false;
        }
        return true;
    };

    VertexResult best;
    const std::size_t p = planes.size();
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    if (n == 0 || n > p) return best;
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n), x;
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = planes[pick[i]];
            b[i] = rhs[pick[i]];
        }
        if (gauss_solve(a, b, x) && feasible(x)) {
            double obj = lp.objective_offset();
            for (std::size_t j = 0; j < n; ++j) obj += lp.objective()[j] * x[j];
            if (!best.feasible || obj < best.objective) {
                best.feasible = true;
                best.objective = obj;
                best.point = x;
            }
        }
        // next combination in lexicographic order
        std::size_t i = n;
        while (i > 0 && pick[i - 1] == p - n + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
    }
    return best;
}

// Random bounded LP: n variables in small boxes, m mixed rows. Roughly half
// the rows are built around a known interior point so many instances are feasible.
template <class Rng>
mgres::lp::LinearProgram random_lp(Rng& rng, std::size_t n, std::size_t m) {
    using namespace mgres::lp;
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    LinearProgram lp;
    std::vector<double> anchor(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = std::round(unif(-5, 2) * 4) / 4;
        const double hi = lo + std::round(unif(0.5, 6) * 4) / 4;
        lp.add_variable("x" + std::to_string(j), lo, hi);
        lp.set_objective(j, std::round(unif(-5, 5) * 8) / 8);
        anchor[j] = unif(lo, hi);
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Term> terms;
        double act = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (unif(0, 1) < 0.35) continue;
            const double c = std::round(unif(-4, 4) * 4) / 4;
            if (c == 0.0) continue;
            terms.push_back({j, c});
            act += c * anchor[j];
        }
        const double kind = unif(0, 1);
        const bool around_anchor = unif(0, 1) < 0.6;
        double rhs = around_anchor ? act + unif(0, 2) : unif(-6, 6);
        Relation rel = Relation::LessEqual;
        if (kind < 0.1) {
            rel = Relation::Equal;
            rhs = around_anchor ? act : rhs;
        } else if (kind < 0.5) {
            rel = Relation::GreaterEqual;
            rhs = around_anchor ? act - unif(0, 2) : rhs;
        }
        lp.add_row("r" + std::to_string(i), std::move(terms), rel, rhs);
    }
    return lp;
}

}  // namespace oracle
