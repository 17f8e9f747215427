#include "sigreg/sigma.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sigreg {

SignatureMatrix signature_matrix(const DaeSystem& sys) {
    SignatureMatrix sm;
    sm.n = sys.n_eqs();
    sm.s.assign(sm.n, std::vector<int>(sm.n, NEG_INF));
    for (int i = 0; i < sm.n; ++i)
        for (int j = 0; j < sm.n; ++j)
            sm.s[i][j] = sys.eqs[i].expr.hod(sys.var_of_column(j));
    if (auto r = solve_hvt(sm.s)) {
        sm.val = r->first;
        sm.hvt = r->second;
    }
    return sm;
}

int formal_hod(const RawNode& n, VarRef v) {
    using K = RawNode::Kind;
    switch (n.kind) {
    case K::Number:
    case K::Time:
    case K::Param:
    case K::Driving:
        return NEG_INF;
    case K::Var:
        return n.var == v ? n.order : NEG_INF;
    case K::Der: {
        int h = formal_hod(*n.kids[0], v);
        return h == NEG_INF ? NEG_INF : h + n.order;
    }
    default: {
        int h = NEG_INF;
        for (auto& k : n.kids) h = std::max(h, formal_hod(*k, v));
        return h;
    }
    }
}

SignatureMatrix formal_signature_matrix(const DaeSystem& sys) {
    SignatureMatrix sm;
    sm.n = sys.n_eqs();
    sm.s.assign(sm.n, std::vector<int>(sm.n, NEG_INF));
    for (int i = 0; i < sm.n; ++i) {
        for (int j = 0; j < sm.n; ++j) {
            VarRef v = sys.var_of_column(j);
            sm.s[i][j] = sys.eqs[i].raw ? formal_hod(*sys.eqs[i].raw, v)
                                        : sys.eqs[i].expr.hod(v);
        }
    }
    if (auto r = solve_hvt(sm.s)) {
        sm.val = r->first;
        sm.hvt = r->second;
    }
    return sm;
}

std::optional<std::pair<long long, std::vector<int>>>
hvt_bruteforce(const SignatureMatrix& sigma) {
    int n = sigma.n;
    if (n > 8) throw Error("hvt_bruteforce: n > 8");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = std::numeric_limits<long long>::min();
    std::vector<int> best_perm;
    do {
        long long v = 0;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            int e = sigma.s[i][perm[i]];
            if (e == NEG_INF) ok = false;
            else v += e;
        }
        if (!ok) continue;
        // strict > keeps the lexicographically smallest maximizer, since
        // next_permutation enumerates in lexicographic order
        if (v > best) {
            best = v;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_perm.empty()) return std::nullopt;
    return std::make_pair(best, best_perm);
}

namespace {

// Maximum-weight perfect matching on the finite entries via the Hungarian
// shortest-augmenting-path scheme (Jonker-Volgenant style potentials).
// Infinite entries are excluded from the graph, never given a big-M weight.
std::optional<long long> lap_value(const std::vector<std::vector<int>>& s,
                                   std::vector<int>* assignment_out) {
    int n = static_cast<int>(s.size());
    if (n == 0) return 0;
    const long long INF = std::numeric_limits<long long>::max() / 4;
    // Minimize cost = -sigma on allowed cells.
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, n), way(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        p[n] = i;
        int j0 = n;
        std::vector<long long> minv(n + 1, INF);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = -1;
            long long delta = INF;
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                if (s[i0][j] == NEG_INF) continue;
                long long cur = -static_cast<long long>(s[i0][j]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0) return std::nullopt;  // no augmenting path: no finite transversal
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    long long total = 0;
    std::vector<int> assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (p[j] < n) {
            assign[p[j]] = j;
            total += s[p[j]][j];
        }
    }
    if (assignment_out) *assignment_out = std::move(assign);
    return total;
}

} // namespace

std::optional<std::pair<long long, std::vector<int>>>
solve_hvt(const std::vector<std::vector<int>>& s) {
    int n = static_cast<int>(s.size());
    std::vector<int> assign;
    auto val = lap_value(s, &assign);
    if (!val) return std::nullopt;

    // Lexicographically smallest row-to-column map among maximizers: fix
    // rows in order, keeping optimality of the remainder.
    std::vector<std::vector<int>> work = s;
    std::vector<int> fixed(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n && fixed[i] < 0; ++j) {
            if (work[i][j] == NEG_INF) continue;
            std::vector<int> saved_row = work[i];
            std::vector<int> saved_col(n);
            for (int r = 0; r < n; ++r) saved_col[r] = work[r][j];
            for (int jj = 0; jj < n; ++jj)
                if (jj != j) work[i][jj] = NEG_INF;
            for (int r = 0; r < n; ++r)
                if (r != i) work[r][j] = NEG_INF;
            auto v2 = lap_value(work, nullptr);
            if (v2 && *v2 == *val) {
                fixed[i] = j;  // keep the restriction
            } else {
                work[i] = saved_row;
                for (int r = 0; r < n; ++r) work[r][j] = saved_col[r];
            }
        }
        if (fixed[i] < 0) return std::nullopt;  // cannot happen if val finite
    }
    return std::make_pair(*val, fixed);
}

Offsets canonical_offsets(const SignatureMatrix& sigma) {
    if (!sigma.finite()) throw Error("canonical_offsets: structurally ill-posed");
    int n = sigma.n;
    const std::vector<int>& hvt = *sigma.hvt;
    Offsets off;
    off.c.assign(n, 0);
    off.d.assign(n, 0);
    // Fixed point of: d_j = max_i (sigma_ij + c_i); c_i = d_{j(i)} - sigma_{i,j(i)}.
    int max_iter = 100 + 10 * n;
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int j = 0; j < n; ++j) {
            int m = 0;
            for (int i = 0; i < n; ++i)
                if (sigma.s[i][j] != NEG_INF)
                    m = std::max(m, sigma.s[i][j] + off.c[i]);
            if (off.d[j] != m) {
                off.d[j] = m;
                changed = true;
            }
        }
        for (int i = 0; i < n; ++i) {
            int ci = off.d[hvt[i]] - sigma.s[i][hvt[i]];
            if (off.c[i] != ci) {
                off.c[i] = ci;
                changed = true;
            }
        }
        if (!changed) {
            off.canonical = true;
            if (!validate_offsets(sigma, off.c, off.d))
                throw Error("canonical_offsets: fixed point is not valid");
            return off;
        }
    }
    throw Error("canonical_offsets: iteration did not converge");
}

bool offsets_feasible(const SignatureMatrix& sigma, const std::vector<int>& c,
                      const std::vector<int>& d) {
    int n = sigma.n;
    if (static_cast<int>(c.size()) != n || static_cast<int>(d.size()) != n) return false;
    for (int i = 0; i < n; ++i)
        if (c[i] < 0) return false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (sigma.s[i][j] != NEG_INF && d[j] - c[i] < sigma.s[i][j]) return false;
    return true;
}

bool validate_offsets(const SignatureMatrix& sigma, const std::vector<int>& c,
                      const std::vector<int>& d) {
    if (!offsets_feasible(sigma, c, d)) return false;
    if (!sigma.finite()) return false;
    // Equality on one HVT <=> equality on all of them <=> the tight cells
    // admit a perfect matching achieving Val.
    long long sum = 0;
    for (int j = 0; j < sigma.n; ++j) sum += d[j];
    for (int i = 0; i < sigma.n; ++i) sum -= c[i];
    return sum == sigma.val;
}

int structural_index(const SignatureMatrix& sigma, const Offsets& off) {
    if (!sigma.finite()) throw Error("structural_index: structurally ill-posed");
    int cmax = 0;
    for (int ci : off.c) cmax = std::max(cmax, ci);
    bool some_dj_zero = false;
    for (int dj : off.d)
        if (dj == 0) some_dj_zero = true;
    return some_dj_zero ? cmax + 1 : cmax;
}

long long dof(const SignatureMatrix& sigma) {
    if (!sigma.finite()) throw Error("dof: structurally ill-posed");
    return sigma.val;
}

FormalReport formal_vs_true(const DaeSystem& sys) {
    FormalReport r;
    r.formal = formal_signature_matrix(sys);
    r.true_sigma = signature_matrix(sys);
    r.differ = r.formal.s != r.true_sigma.s;
    if (r.differ) {
        if (r.formal.finite() && r.true_sigma.finite() &&
            r.formal.val == r.true_sigma.val)
            r.alternative = 1;
        else if (r.formal.val != r.true_sigma.val)
            r.alternative = 2;
    }
    return r;
}

} // namespace sigreg
