#include "sigreg/jacobian.hpp"

#include <algorithm>
#include <cmath>

namespace sigreg {

const char* classification_name(Classification c) {
    switch (c) {
    case Classification::GenericallyNonsingular: return "generically nonsingular";
    case Classification::IdenticallySingular: return "identically singular";
    case Classification::StructurallySingular: return "structurally singular";
    }
    return "?";
}

SystemJacobian system_jacobian(const DaeSystem& sys, const SignatureMatrix& sigma,
                               const Offsets& off, int det_bound,
                               const std::vector<Expression>* reduce_by) {
    int n = sigma.n;
    SystemJacobian J;
    J.n = n;
    J.offsets = off;
    J.entries.assign(n, std::vector<Expression>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int lead = off.d[j] - off.c[i];
            if (lead < 0 || sigma.s[i][j] == NEG_INF || sigma.s[i][j] != lead)
                continue;  // entry is identically zero by Griewank slack
            VarRef v = sys.var_of_column(j);
            Expression e = sys.eqs[i].expr.partial(atom_var(v, lead));
            if (reduce_by)
                for (const Expression& rel : *reduce_by) e = e.reduce_mod(rel);
            J.entries[i][j] = e;
        }
    }
    J.cls = classify(J.entries, &J.det, det_bound);
    return J;
}

namespace {

// Bipartite matching over structural nonzeros (Kuhn's augmenting paths).
int max_matching(const std::vector<std::vector<Expression>>& m) {
    int n = static_cast<int>(m.size());
    std::vector<int> match_col(n, -1);
    std::vector<char> used;
    std::function<bool(int)> try_row = [&](int i) -> bool {
        for (int j = 0; j < n; ++j) {
            if (used[j] || m[i][j].is_zero()) continue;
            used[j] = true;
            if (match_col[j] < 0 || try_row(match_col[j])) {
                match_col[j] = i;
                return true;
            }
        }
        return false;
    };
    int size = 0;
    for (int i = 0; i < n; ++i) {
        used.assign(n, false);
        if (try_row(i)) ++size;
    }
    return size;
}

struct Elimination {
    // Reduced rows from Gauss-Jordan elimination with full symbolic
    // pivoting; pivot_cols[k] is the column of the k-th pivot.
    std::vector<std::vector<Expression>> rows;
    std::vector<int> pivot_cols;
    int rank = 0;
};

int pivot_weight(const Expression& e) {
    return e.num().term_count() + e.den().term_count();
}

Elimination eliminate(std::vector<std::vector<Expression>> m) {
    int n_rows = static_cast<int>(m.size());
    int n_cols = n_rows ? static_cast<int>(m[0].size()) : 0;
    Elimination el;
    std::vector<char> row_done(n_rows, false), col_done(n_cols, false);
    std::vector<int> pivot_rows;

    for (;;) {
        int best_i = -1, best_j = -1, best_w = 0;
        for (int i = 0; i < n_rows; ++i) {
            if (row_done[i]) continue;
            for (int j = 0; j < n_cols; ++j) {
                if (col_done[j] || m[i][j].is_zero()) continue;
                int w = pivot_weight(m[i][j]);
                if (best_i < 0 || w < best_w) {
                    best_i = i;
                    best_j = j;
                    best_w = w;
                }
            }
        }
        if (best_i < 0) break;
        const Expression piv = m[best_i][best_j];
        // Gauss-Jordan: clear the pivot column from every other row so each
        // pivot row ends up depending on free columns only.
        for (int i = 0; i < n_rows; ++i) {
            if (i == best_i || m[i][best_j].is_zero()) continue;
            Expression factor = m[i][best_j] / piv;
            for (int j = 0; j < n_cols; ++j)
                m[i][j] = m[i][j] - factor * m[best_i][j];
            m[i][best_j] = Expression();
        }
        row_done[best_i] = true;
        col_done[best_j] = true;
        el.pivot_cols.push_back(best_j);
        pivot_rows.push_back(best_i);
        ++el.rank;
    }
    for (int r : pivot_rows) el.rows.push_back(m[r]);
    return el;
}

} // namespace

int symbolic_rank(const std::vector<std::vector<Expression>>& m) {
    return eliminate(m).rank;
}

Expression symbolic_det(const std::vector<std::vector<Expression>>& m) {
    int n = static_cast<int>(m.size());
    if (n == 0) return Expression(1L);
    // Gaussian elimination over the rational-expression field with the
    // deterministic pivot rule; exact arithmetic keeps this fraction-safe.
    std::vector<std::vector<Expression>> w = m;
    std::vector<char> row_done(n, false), col_done(n, false);
    Expression det(1L);
    std::vector<std::pair<int, int>> pivots;
    for (int step = 0; step < n; ++step) {
        int best_i = -1, best_j = -1, best_w = 0;
        for (int i = 0; i < n; ++i) {
            if (row_done[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (col_done[j] || w[i][j].is_zero()) continue;
                int wt = pivot_weight(w[i][j]);
                if (best_i < 0 || wt < best_w) {
                    best_i = i;
                    best_j = j;
                    best_w = wt;
                }
            }
        }
        if (best_i < 0) return Expression();  // rank deficient
        const Expression piv = w[best_i][best_j];
        det = det * piv;
        for (int i = 0; i < n; ++i) {
            if (row_done[i] || i == best_i || w[i][best_j].is_zero()) continue;
            Expression factor = w[i][best_j] / piv;
            for (int j = 0; j < n; ++j) {
                if (col_done[j]) continue;
                w[i][j] = w[i][j] - factor * w[best_i][j];
            }
        }
        row_done[best_i] = true;
        col_done[best_j] = true;
        pivots.emplace_back(best_i, best_j);
    }
    // Permutation sign of the pivot pattern.
    std::vector<int> perm(n);
    for (auto& [i, j] : pivots) perm[i] = j;
    int sign = 1;
    std::vector<char> seen(n, false);
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (int j = i; !seen[j]; j = perm[j]) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign < 0 ? -det : det;
}

Classification classify(const std::vector<std::vector<Expression>>& m,
                        std::optional<Expression>* det_out, int det_bound) {
    int n = static_cast<int>(m.size());
    if (max_matching(m) < n) {
        if (det_out) *det_out = Expression();
        return Classification::StructurallySingular;
    }
    if (n <= det_bound) {
        Expression d = symbolic_det(m);
        if (det_out) *det_out = d;
        return is_identically_zero(d) ? Classification::IdenticallySingular
                                      : Classification::GenericallyNonsingular;
    }
    int r = symbolic_rank(m);
    if (det_out) det_out->reset();
    return r < n ? Classification::IdenticallySingular
                 : Classification::GenericallyNonsingular;
}

namespace {

// Clear denominators and common content to get the simplest-form polynomial
// vector (no fractions, no common factor of rational content or monomials).
std::vector<Expression> simplest_form(std::vector<Expression> u) {
    // multiply through by every denominator (heuristic LCD)
    for (size_t pass = 0; pass < u.size(); ++pass) {
        const Expression* worst = nullptr;
        for (auto& e : u)
            if (!e.is_polynomial()) {
                worst = &e;
                break;
            }
        if (!worst) break;
        Expression den = Expression::make(worst->den(), Poly(mpq_class(1)));
        for (auto& e : u) e = e * den;
    }
    // rational content across all coefficients of all entries
    mpz_class num_gcd = 0, den_lcm = 1;
    for (auto& e : u)
        for (const Term& t : e.num().terms()) {
            mpz_class an = abs(t.c.get_num());
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), an.get_mpz_t());
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.c.get_den().get_mpz_t());
        }
    if (num_gcd != 0) {
        mpq_class content(num_gcd, den_lcm);
        content.canonicalize();
        if (content != 1)
            for (auto& e : u) e = e * Expression(mpq_class(1) / content);
    }
    // common monomial factor
    {
        Monomial g;
        bool first = true;
        for (auto& e : u) {
            if (e.is_zero()) continue;
            Monomial mc = e.num().monomial_content();
            g = first ? mc : mono_gcd(g, mc);
            first = false;
        }
        if (!first && !g.is_one())
            for (auto& e : u)
                if (!e.is_zero())
                    e = Expression::make(e.num().div_monomial(g), Poly(mpq_class(1)));
    }
    // common polynomial factor via pairwise trial division
    const Expression* smallest = nullptr;
    for (auto& e : u)
        if (!e.is_zero() && (!smallest || pivot_weight(e) < pivot_weight(*smallest)))
            smallest = &e;
    if (smallest && !smallest->num().is_constant()) {
        Expression cand = *smallest;
        bool divides_all = true;
        std::vector<Expression> reduced;
        for (auto& e : u) {
            if (e.is_zero()) {
                reduced.push_back(e);
                continue;
            }
            auto q = e.num().divide(cand.num());
            if (!q) {
                divides_all = false;
                break;
            }
            reduced.push_back(Expression::make(std::move(*q), Poly(mpq_class(1))));
        }
        if (divides_all) u = std::move(reduced);
    }
    // normalize sign: first nonzero entry positive leading coefficient
    for (auto& e : u) {
        if (e.is_zero()) continue;
        if (e.num().lead().c < 0)
            for (auto& f : u) f = -f;
        break;
    }
    return u;
}

} // namespace

std::optional<std::vector<Expression>>
null_vector(const std::vector<std::vector<Expression>>& m, KernelSide side) {
    int n = static_cast<int>(m.size());
    std::vector<std::vector<Expression>> a(n, std::vector<Expression>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i][j] = side == KernelSide::Left ? m[j][i] : m[i][j];

    Elimination el = eliminate(a);
    if (el.rank >= n) return std::nullopt;

    std::vector<char> is_pivot_col(n, false);
    for (int j : el.pivot_cols) is_pivot_col[j] = true;
    int free_col = -1;
    for (int j = 0; j < n; ++j)
        if (!is_pivot_col[j]) {
            free_col = j;
            break;
        }

    std::vector<Expression> u(n);
    u[free_col] = Expression(1L);
    // Pivot rows were fully reduced against each other (Gauss-Jordan style),
    // so each pivot variable depends only on free columns.
    for (int k = 0; k < el.rank; ++k) {
        int pc = el.pivot_cols[k];
        const auto& row = el.rows[k];
        Expression rhs;
        for (int j = 0; j < n; ++j)
            if (j != pc && !row[j].is_zero()) rhs = rhs - row[j] * u[j];
        u[pc] = rhs / row[pc];
    }
    u = simplest_form(std::move(u));
    int nonzero = 0;
    for (auto& e : u)
        if (!e.is_zero()) ++nonzero;
    if (nonzero == 0) return std::nullopt;
    return u;
}

bool check_kernel(const std::vector<std::vector<Expression>>& m,
                  const std::vector<Expression>& u, KernelSide side) {
    int n = static_cast<int>(m.size());
    for (int j = 0; j < n; ++j) {
        Expression acc;
        for (int i = 0; i < n; ++i)
            acc = acc + (side == KernelSide::Left ? m[i][j] : m[j][i]) * u[i];
        if (!is_identically_zero(acc)) return false;
    }
    return true;
}

double numeric_det(const SystemJacobian& J, const ValuePoint& p) {
    int n = J.n;
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!J.entries[i][j].is_zero())
                a[i][j] = J.entries[i][j].evaluate(p).as_double();
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (a[piv][k] == 0.0) return 0.0;
        if (piv != k) {
            std::swap(a[piv], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (int i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

double numeric_inf_norm(const SystemJacobian& J, const ValuePoint& p) {
    double norm = 0.0;
    for (int i = 0; i < J.n; ++i) {
        double row = 0.0;
        for (int j = 0; j < J.n; ++j)
            if (!J.entries[i][j].is_zero())
                row += std::abs(J.entries[i][j].evaluate(p).as_double());
        norm = std::max(norm, row);
    }
    return norm;
}

} // namespace sigreg
