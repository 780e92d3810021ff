// Bounded-variable revised primal simplex.
//
// Every kept row i becomes  sum_j a_ij x_j - s_i = 0  with a logical s_i whose
// bounds encode the relation. Rows whose initial activity falls outside the
// logical's range get an artificial column; phase one drives the artificials
// to zero. The basis is held as a sparse LU (Eigen) plus a product-form eta
// file that is rebuilt every `refactor_interval` pivots.
//
// Pricing is Dantzig (largest reduced cost, lowest index on ties) and drops to
// Bland's rule after a run of degenerate pivots, which restores the
// anti-cycling guarantee.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "mgres/lp/solver.hpp"

namespace mgres::lp {

IterationLimit::IterationLimit(std::size_t iters, int ph, double infeas)
    : std::runtime_error("simplex iteration limit reached after " + std::to_string(iters) +
                         " iterations in phase " + std::to_string(ph) +
                         " (primal infeasibility " + std::to_string(infeas) + ")"),
      iterations(iters),
      phase(ph),
      infeasibility(infeas) {}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Singleton rows become bounds, empty rows are checked, duplicate terms merged.
struct Presolve {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::size_t> lower_row;  // row that produced the bound, or npos
    std::vector<std::size_t> upper_row;
    std::vector<std::size_t> kept;       // original indices of rows left for the simplex
    std::vector<std::vector<Term>> kept_terms;
    bool infeasible = false;
    std::vector<std::size_t> certificate;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Presolve(const LinearProgram& lp, double tol) {
        const auto n = lp.num_variables();
        lower.resize(n);
        upper.resize(n);
        lower_row.assign(n, npos);
        upper_row.assign(n, npos);
        for (std::size_t j = 0; j < n; ++j) {
            lower[j] = lp.variable(j).lower;
            upper[j] = lp.variable(j).upper;
        }
        std::vector<double> acc(n, 0.0);
        std::vector<char> seen(n, 0);
        for (std::size_t i = 0; i < lp.num_rows(); ++i) {
            const auto& row = lp.row(i);
            std::vector<Term> merged;
            for (const auto& t : row.terms) {
                if (!seen[t.var]) {
                    seen[t.var] = 1;
                    merged.push_back({t.var, 0.0});
                }
                acc[t.var] += t.coef;
            }
            std::vector<Term> terms;
            for (auto& t : merged) {
                if (acc[t.var] != 0.0) terms.push_back({t.var, acc[t.var]});
                acc[t.var] = 0.0;
                seen[t.var] = 0;
            }
            if (terms.empty()) {
                const bool ok = (row.relation == Relation::LessEqual && row.rhs >= -tol) ||
                                (row.relation == Relation::GreaterEqual && row.rhs <= tol) ||
                                (row.relation == Relation::Equal && std::abs(row.rhs) <= tol);
                if (!ok) {
                    infeasible = true;
                    certificate = {i};
                    return;
                }
                continue;
            }
            if (terms.size() == 1) {
                const auto j = terms[0].var;
                const double a = terms[0].coef;
                const double v = row.rhs / a;
                bool sets_upper = row.relation == Relation::Equal;
                bool sets_lower = row.relation == Relation::Equal;
                if (row.relation == Relation::LessEqual) (a > 0 ? sets_upper : sets_lower) = true;
                if (row.relation == Relation::GreaterEqual) (a > 0 ? sets_lower : sets_upper) = true;
                if (sets_upper && v < upper[j]) {
                    upper[j] = v;
                    upper_row[j] = i;
                }
                if (sets_lower && v > lower[j]) {
                    lower[j] = v;
                    lower_row[j] = i;
                }
                continue;
            }
            kept.push_back(i);
            kept_terms.push_back(std::move(terms));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (lower[j] > upper[j] + tol) {
                infeasible = true;
                for (auto r : {lower_row[j], upper_row[j]})
                    if (r != npos) certificate.push_back(r);
                return;
            }
            if (lower[j] > upper[j]) {
                const double mid = 0.5 * (lower[j] + upper[j]);
                lower[j] = upper[j] = mid;
            }
        }
    }
};

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, AtZero };

struct Eta {
    int r;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // off-pivot nonzeros of the entering column
};

class Simplex {
public:
    Simplex(const LinearProgram& lp, const Presolve& pre, const SolverOptions& opt)
        : lp_(lp), pre_(pre), opt_(opt) {
        n_ = static_cast<int>(lp.num_variables());
        m_ = static_cast<int>(pre.kept.size());
        build_columns();
    }

    LpSolution run() {
        LpSolution sol;
        setup_initial_basis();
        refactor();
        recompute_basics();
        if (n_art_ > 0) {
            set_phase_one_costs();
            if (iterate(1) != Outcome::Optimal)
                throw NumericalFailure("phase one reported an unbounded ray");
            const double infeas = artificial_sum();
            if (infeas > opt_.feas_tol) {
                sol.status = SolveStatus::Infeasible;
                sol.iterations = iterations_;
                sol.certificate_rows = certificate_from_duals();
                return sol;
            }
            for (int k = 0; k < n_art_; ++k) {
                const int j = n_ + m_ + k;
                ub_[j] = 0.0;
                lb_[j] = 0.0;
                if (state_[j] != VarState::Basic) {
                    state_[j] = VarState::AtLower;
                    x_[j] = 0.0;
                }
            }
            recompute_basics();
        }
        set_phase_two_costs();
        if (iterate(2) == Outcome::Unbounded) {
            sol.status = SolveStatus::Unbounded;
            sol.iterations = iterations_;
            return sol;
        }
        sol.status = SolveStatus::Optimal;
        sol.iterations = iterations_;
        sol.values.assign(x_.begin(), x_.begin() + n_);
        for (int j = 0; j < n_; ++j) {
            // basic values can sit a hair outside a bound after recomputation
            sol.values[j] = std::clamp(sol.values[j], pre_.lower[j], pre_.upper[j]);
        }
        sol.objective_value = lp_.evaluate_objective(sol.values);
        return sol;
    }

private:
    enum class Outcome { Optimal, Unbounded };

    const LinearProgram& lp_;
    const Presolve& pre_;
    const SolverOptions& opt_;
    int n_ = 0;
    int m_ = 0;
    int n_art_ = 0;

    // structural columns (CSC)
    std::vector<int> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    std::vector<double> rhs_lo_, rhs_hi_;  // logical bounds per kept row
    std::vector<int> art_row_;
    std::vector<double> art_sign_;

    std::vector<double> lb_, ub_, cost_, x_;
    std::vector<VarState> state_;
    std::vector<int> head_;  // basis position -> column
    std::vector<int> pos_;   // column -> basis position or -1

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
    std::size_t iterations_ = 0;
    std::size_t degenerate_run_ = 0;

    int total_cols() const { return n_ + m_ + n_art_; }

    void build_columns() {
        std::vector<int> count(n_, 0);
        for (const auto& terms : pre_.kept_terms)
            for (const auto& t : terms) ++count[t.var];
        col_start_.assign(n_ + 1, 0);
        for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
        col_row_.resize(col_start_[n_]);
        col_val_.resize(col_start_[n_]);
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int i = 0; i < m_; ++i) {
            for (const auto& t : pre_.kept_terms[i]) {
                const int p = fill[t.var]++;
                col_row_[p] = i;
                col_val_[p] = t.coef;
            }
        }
        rhs_lo_.resize(m_);
        rhs_hi_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const auto& row = lp_.row(pre_.kept[i]);
            switch (row.relation) {
                case Relation::LessEqual: rhs_lo_[i] = -kInf; rhs_hi_[i] = row.rhs; break;
                case Relation::GreaterEqual: rhs_lo_[i] = row.rhs; rhs_hi_[i] = kInf; break;
                case Relation::Equal: rhs_lo_[i] = rhs_hi_[i] = row.rhs; break;
            }
        }
    }

    template <class F>
    void for_column(int j, F&& f) const {
        if (j < n_) {
            for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) f(col_row_[p], col_val_[p]);
        } else if (j < n_ + m_) {
            f(j - n_, -1.0);
        } else {
            const int k = j - n_ - m_;
            f(art_row_[k], art_sign_[k]);
        }
    }

    double dot_column(int j, const Eigen::VectorXd& y) const {
        double s = 0.0;
        for_column(j, [&](int i, double v) { s += v * y[i]; });
        return s;
    }

    void setup_initial_basis() {
        lb_.assign(n_ + m_, 0.0);
        ub_.assign(n_ + m_, 0.0);
        x_.assign(n_ + m_, 0.0);
        state_.assign(n_ + m_, VarState::AtLower);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = pre_.lower[j];
            ub_[j] = pre_.upper[j];
            if (std::isfinite(lb_[j])) {
                state_[j] = VarState::AtLower;
                x_[j] = lb_[j];
            } else if (std::isfinite(ub_[j])) {
                state_[j] = VarState::AtUpper;
                x_[j] = ub_[j];
            } else {
                state_[j] = VarState::AtZero;
                x_[j] = 0.0;
            }
        }
        std::vector<double> activity(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (x_[j] == 0.0) continue;
            for_column(j, [&](int i, double v) { activity[i] += v * x_[j]; });
        }
        head_.assign(m_, -1);
        for (int i = 0; i < m_; ++i) {
            const int s = n_ + i;
            lb_[s] = rhs_lo_[i];
            ub_[s] = rhs_hi_[i];
            const double a = activity[i];
            if (a >= lb_[s] && a <= ub_[s]) {
                state_[s] = VarState::Basic;
                x_[s] = a;
                head_[i] = s;
                continue;
            }
            // logical sits at the violated bound; an artificial absorbs the gap
            const double v = a < lb_[s] ? lb_[s] : ub_[s];
            state_[s] = a < lb_[s] ? VarState::AtLower : VarState::AtUpper;
            x_[s] = v;
            const double gap = v - a;
            art_row_.push_back(i);
            art_sign_.push_back(gap > 0 ? 1.0 : -1.0);
            lb_.push_back(0.0);
            ub_.push_back(kInf);
            x_.push_back(std::abs(gap));
            state_.push_back(VarState::Basic);
            head_[i] = n_ + m_ + n_art_;
            ++n_art_;
        }
        pos_.assign(total_cols(), -1);
        for (int i = 0; i < m_; ++i) pos_[head_[i]] = i;
        cost_.assign(total_cols(), 0.0);
    }

    void set_phase_one_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int k = 0; k < n_art_; ++k) cost_[n_ + m_ + k] = 1.0;
    }

    void set_phase_two_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int j = 0; j < n_; ++j) cost_[j] = lp_.objective()[j];
    }

    double artificial_sum() const {
        double s = 0.0;
        for (int k = 0; k < n_art_; ++k) s += std::max(0.0, x_[n_ + m_ + k]);
        return s;
    }

    void refactor() {
        etas_.clear();
        if (m_ == 0) return;
        std::vector<Eigen::Triplet<double, int>> trip;
        trip.reserve(static_cast<std::size_t>(m_) * 3);
        for (int p = 0; p < m_; ++p)
            for_column(head_[p], [&](int i, double v) { trip.emplace_back(i, p, v); });
        SpMat b(m_, m_);
        b.setFromTriplets(trip.begin(), trip.end());
        b.makeCompressed();
        lu_.analyzePattern(b);
        lu_.factorize(b);
        if (lu_.info() != Eigen::Success)
            throw NumericalFailure("basis factorization failed: " + lu_.lastErrorMessage());
    }

    Eigen::VectorXd ftran(Eigen::VectorXd v) {
        if (m_ == 0) return v;
        Eigen::VectorXd z = lu_.solve(v);
        for (const auto& e : etas_) {
            const double zr = z[e.r] / e.pivot;
            z[e.r] = zr;
            if (zr != 0.0)
                for (const auto& [i, a] : e.entries) z[i] -= a * zr;
        }
        return z;
    }

    Eigen::VectorXd btran(Eigen::VectorXd v) {
        if (m_ == 0) return v;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = v[it->r];
            for (const auto& [i, a] : it->entries) s -= a * v[i];
            v[it->r] = s / it->pivot;
        }
        Eigen::VectorXd y = lu_.transpose().solve(v);
        return y;
    }

    void recompute_basics() {
        if (m_ == 0) return;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < total_cols(); ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
            const double xj = x_[j];
            for_column(j, [&](int i, double v) { rhs[i] -= v * xj; });
        }
        Eigen::VectorXd xb = ftran(rhs);
        for (int p = 0; p < m_; ++p) x_[head_[p]] = xb[p];
    }

    double max_basic_infeasibility() const {
        double worst = 0.0;
        for (int p = 0; p < m_; ++p) {
            const int j = head_[p];
            worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
        }
        return worst;
    }

    std::vector<std::size_t> certificate_from_duals() {
        Eigen::VectorXd cb(m_);
        for (int p = 0; p < m_; ++p) cb[p] = cost_[head_[p]];
        const Eigen::VectorXd y = btran(cb);
        std::vector<std::size_t> rows;
        for (int i = 0; i < m_; ++i)
            if (std::abs(y[i]) > opt_.opt_tol) rows.push_back(pre_.kept[i]);
        return rows;
    }

    // Reduced-cost direction a nonbasic column may move in: +1, -1 or 0.
    int favorable(int j, double d) const {
        switch (state_[j]) {
            case VarState::Basic: return 0;
            case VarState::AtLower:
                if (ub_[j] <= lb_[j]) return 0;
                return d < -opt_.opt_tol ? 1 : 0;
            case VarState::AtUpper:
                if (ub_[j] <= lb_[j]) return 0;
                return d > opt_.opt_tol ? -1 : 0;
            case VarState::AtZero:
                if (d < -opt_.opt_tol) return 1;
                if (d > opt_.opt_tol) return -1;
                return 0;
        }
        return 0;
    }

    Outcome iterate(int phase) {
        std::size_t since_refactor = 0;
        for (;;) {
            if (iterations_ >= opt_.max_iterations)
                throw IterationLimit(iterations_, phase, max_basic_infeasibility());
            if (since_refactor >= opt_.refactor_interval) {
                refactor();
                recompute_basics();
                since_refactor = 0;
            }
            Eigen::VectorXd cb(m_);
            for (int p = 0; p < m_; ++p) cb[p] = cost_[head_[p]];
            const Eigen::VectorXd y = btran(cb);

            const bool bland = degenerate_run_ >= opt_.degenerate_switch;
            int q = -1;
            int dir = 0;
            double best = 0.0;
            for (int j = 0; j < total_cols(); ++j) {
                if (state_[j] == VarState::Basic) continue;
                const double d = cost_[j] - dot_column(j, y);
                const int f = favorable(j, d);
                if (f == 0) continue;
                if (bland) {
                    q = j;
                    dir = f;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = f;
                }
            }
            if (q < 0) {
                // confirm optimality on a fresh factorization before stopping
                if (since_refactor == 0) return Outcome::Optimal;
                refactor();
                recompute_basics();
                since_refactor = 0;
                if (max_basic_infeasibility() > opt_.feas_tol && phase == 2)
                    throw NumericalFailure("basis lost primal feasibility on refactorization");
                continue;
            }

            Eigen::VectorXd col = Eigen::VectorXd::Zero(m_);
            for_column(q, [&](int i, double v) { col[i] = v; });
            const Eigen::VectorXd alpha = ftran(col);

            // x_B changes by -dir * alpha * t
            double t_best = kInf;
            int r = -1;
            double r_alpha = 0.0;
            const double own_range = ub_[q] - lb_[q];
            for (int p = 0; p < m_; ++p) {
                const double a = alpha[p];
                if (std::abs(a) <= opt_.pivot_tol) continue;
                const int j = head_[p];
                const double delta = -dir * a;
                double limit;
                if (delta < 0) {
                    if (!std::isfinite(lb_[j])) continue;
                    limit = (x_[j] - lb_[j]) / -delta;
                } else {
                    if (!std::isfinite(ub_[j])) continue;
                    limit = (ub_[j] - x_[j]) / delta;
                }
                limit = std::max(limit, 0.0);
                const double tie = 1e-12 * std::max(1.0, std::abs(t_best));
                if (r < 0 || limit < t_best - tie) {
                    t_best = limit;
                    r = p;
                    r_alpha = a;
                } else if (limit <= t_best + tie) {
                    const bool take = bland ? head_[p] < head_[r] : std::abs(a) > std::abs(r_alpha);
                    if (take) {
                        t_best = std::min(t_best, limit);
                        r = p;
                        r_alpha = a;
                    }
                }
            }
            const bool flip = std::isfinite(own_range) && own_range <= t_best;
            if (!flip && r < 0) {
                if (phase == 1) throw NumericalFailure("unbounded direction in phase one");
                return Outcome::Unbounded;
            }
            const double t = flip ? own_range : t_best;
            ++iterations_;
            degenerate_run_ = t <= 1e-12 ? degenerate_run_ + 1 : 0;

            if (t != 0.0) {
                x_[q] += dir * t;
                for (int p = 0; p < m_; ++p)
                    if (alpha[p] != 0.0) x_[head_[p]] -= dir * alpha[p] * t;
            }
            if (flip) {
                state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                x_[q] = dir > 0 ? ub_[q] : lb_[q];
                continue;
            }
            const int leaving = head_[r];
            const double delta_r = -dir * alpha[r];
            if (delta_r < 0) {
                state_[leaving] = VarState::AtLower;
                x_[leaving] = lb_[leaving];
            } else {
                state_[leaving] = VarState::AtUpper;
                x_[leaving] = ub_[leaving];
            }
            pos_[leaving] = -1;
            head_[r] = q;
            pos_[q] = r;
            state_[q] = VarState::Basic;

            Eta e;
            e.r = r;
            e.pivot = alpha[r];
            for (int p = 0; p < m_; ++p)
                if (p != r && alpha[p] != 0.0) e.entries.emplace_back(p, alpha[p]);
            etas_.push_back(std::move(e));
            ++since_refactor;
        }
    }
};

}  // namespace

LpSolution SimplexBackend::solve(const LinearProgram& lp, const SolverOptions& options) const {
    lp.validate();
    Presolve pre(lp, options.feas_tol);
    if (pre.infeasible) {
        LpSolution sol;
        sol.status = SolveStatus::Infeasible;
        sol.certificate_rows = pre.certificate;
        return sol;
    }
    Simplex simplex(lp, pre, options);
    return simplex.run();
}

LpSolution solve(const LinearProgram& lp, const SolverOptions& options) {
    static const SimplexBackend backend;
    return backend.solve(lp, options);
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
    }
    return "?";
}

}  // namespace mgres::lp
