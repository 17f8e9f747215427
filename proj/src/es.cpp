#include "sigreg/es.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sigreg {

namespace {

int vector_hod(const std::vector<Expression>& u, VarRef v) {
    int h = NEG_INF;
    for (auto& e : u) h = std::max(h, e.hod(v));
    return h;
}

bool entry_always_nonzero(const Expression& e) {
    auto c = e.as_constant();
    return c && *c != 0;
}

std::string fresh_aux_name(const DaeSystem& sys, const std::vector<std::string>& taken,
                           int k) {
    for (int suffix = k;; ++suffix) {
        std::string cand = "w" + std::to_string(suffix);
        bool clash = sys.find_var(cand).has_value() || sys.const_value(cand).has_value();
        for (auto& t : taken) clash = clash || t == cand;
        for (auto& in : sys.inputs) clash = clash || in == cand;
        for (auto& f : sys.funcs) clash = clash || f.name == cand;
        if (!clash) return cand;
    }
}

} // namespace

EsAnalysis es_analyze(const DaeSystem& sys, const SignatureMatrix& sigma,
                      const Offsets& off, const std::vector<Expression>& u) {
    int n = sigma.n;
    if (static_cast<int>(u.size()) != n)
        throw Error("es_analyze: u has wrong dimension");
    EsAnalysis a;
    a.u = u;
    a.offsets = off;
    for (int j = 0; j < n; ++j)
        if (!is_identically_zero(u[j])) a.L.push_back(j);
    a.s = static_cast<int>(a.L.size());
    if (a.s < 2)
        throw Error("es_analyze: u has fewer than two nonzero entries; "
                    "the Jacobian has an identically zero column");
    for (int i = 0; i < n; ++i) {
        bool tight = false;
        for (int j : a.L)
            if (sigma.s[i][j] != NEG_INF && off.d[j] - off.c[i] == sigma.s[i][j])
                tight = true;
        if (tight) a.I.push_back(i);
    }
    if (a.I.empty())
        throw Error("es_analyze: no equation has a tight entry in the columns of u");
    a.C = off.c[a.I[0]];
    for (int i : a.I) a.C = std::max(a.C, off.c[i]);

    a.cond_hod_ok = true;
    for (int j = 0; j < n; ++j) {
        EsHodMargin m;
        m.var_column = j;
        m.hod_u = vector_hod(u, sys.var_of_column(j));
        bool in_L = std::find(a.L.begin(), a.L.end(), j) != a.L.end();
        m.bound = off.d[j] - a.C - (in_L ? 1 : 0);
        m.ok = m.hod_u <= m.bound;
        if (!m.ok) a.cond_hod_ok = false;
        a.hod_margins.push_back(m);
    }
    a.cond_order_ok = true;
    for (int j : a.L) {
        EsOrderMargin m;
        m.var_column = j;
        m.margin = off.d[j] - a.C;
        m.ok = m.margin >= 0;
        if (!m.ok) a.cond_order_ok = false;
        a.order_margins.push_back(m);
    }
    return a;
}

int es_pick_pivot(const EsAnalysis& a) {
    for (int l : a.L)
        if (entry_always_nonzero(a.u[l])) return l;
    return a.L.front();
}

EsResult es_step(const DaeSystem& sys, const SignatureMatrix& sigma,
                 const EsAnalysis& a, int l, bool keep_gl) {
    if (!a.cond_hod_ok || !a.cond_order_ok)
        throw Error("es_step: sufficient conditions violated; refusing the step");
    if (std::find(a.L.begin(), a.L.end(), l) == a.L.end())
        throw Error("es_step: pivot column " + std::to_string(l) + " is not in L");
    if (is_identically_zero(a.u[l]))
        throw Error("es_step: u_l is identically zero");

    int n = sys.n_eqs();
    const Offsets& off = a.offsets;
    int C = a.C;

    EsResult r;
    r.converted = sys;
    r.converted.parent = std::make_shared<DaeSystem>(sys);

    ConversionStep st;
    st.method = ConversionMethod::ES;
    st.u = a.u;
    st.pivot = l;
    st.equivalence_condition = a.u[l];
    st.always_nonzero = entry_always_nonzero(a.u[l]);
    st.val_before = sigma.val;
    st.c_used = off.c;
    st.d_used = off.d;
    st.es_L = a.L;
    st.es_I = a.I;
    st.es_C = C;

    VarRef xl = sys.var_of_column(l);
    Expression xl_lead = Expression::var(xl, off.d[l] - C);

    // Fresh auxiliary variables for the columns of L except the pivot, plus
    // their replacement expressions y_j + (u_j/u_l) x_l^{(d_l - C)}.
    std::map<int, Expression> repl_base;   // column j -> replacement base
    std::map<int, Expression> def_of_col;  // column j -> defining expression
    std::vector<std::string> taken;
    for (int j : a.L) {
        if (j == l) continue;
        int aux_idx = r.converted.n_aux();
        std::string name = fresh_aux_name(sys, taken, aux_idx + 1);
        taken.push_back(name);
        r.converted.aux_names.push_back(name);
        st.es_aux_of_column.emplace_back(j, aux_idx);
        Expression y = Expression::var({true, aux_idx}, 0);
        Expression ratio = a.u[j] / a.u[l];
        VarRef xj = sys.var_of_column(j);
        repl_base.emplace(j, y + ratio * xl_lead);
        def_of_col.emplace(j, Expression::var(xj, off.d[j] - C) - ratio * xl_lead);
    }

    // In each equation of I substitute every occurrence of x_j^{(q)} with
    // q >= d_j - C (simultaneously), which both removes the tight leading
    // derivatives and keeps the substituted variables out of the result.
    for (int i : a.I) {
        std::map<AtomId, Expression> subs;
        for (int j : a.L) {
            if (j == l) continue;
            VarRef xj = sys.var_of_column(j);
            int top = sys.eqs[i].expr.hod(xj);
            for (int q = off.d[j] - C; q <= top; ++q) {
                AtomId target = atom_var(xj, q);
                if (!sys.eqs[i].expr.depends_on(target)) continue;
                subs.emplace(target, repl_base.at(j).total_derivative(q - (off.d[j] - C)));
                st.substitutions.push_back({i, xj, q});
            }
        }
        if (subs.empty()) continue;
        r.converted.eqs[i].expr = sys.eqs[i].expr.substitute_many(subs);
        r.converted.eqs[i].raw = nullptr;
    }

    // Prescribing equations g_j = -y_j + x_j^{(d_j - C)} - (u_j/u_l) x_l^{(d_l - C)}.
    for (auto& [j, aux_idx] : st.es_aux_of_column) {
        Expression y = Expression::var({true, aux_idx}, 0);
        Equation g;
        g.name = "g_" + sys.var_name(sys.var_of_column(j));
        g.expr = -y + def_of_col.at(j);
        r.converted.eqs.push_back(std::move(g));
        st.added.push_back(r.converted.eqs.back().name);
    }
    if (keep_gl) {
        int aux_idx = r.converted.n_aux();
        r.converted.aux_names.push_back(fresh_aux_name(sys, taken, aux_idx + 1));
        Expression y = Expression::var({true, aux_idx}, 0);
        Equation g;
        g.name = "g_" + sys.var_name(xl);
        g.expr = -y + xl_lead;
        r.converted.eqs.push_back(std::move(g));
        st.added.push_back(r.converted.eqs.back().name);
        st.es_aux_of_column.emplace_back(l, aux_idx);
    }

    // Offsets prescribed for the converted system: old ones on the original
    // rows and columns, C on the appended ones.
    r.stamped.c = off.c;
    r.stamped.d = off.d;
    for (size_t k = 0; k < st.es_aux_of_column.size(); ++k) {
        r.stamped.c.push_back(C);
        r.stamped.d.push_back(C);
    }
    r.stamped.canonical = false;

    SignatureMatrix after = signature_matrix(r.converted);
    st.val_after = after.finite() ? after.val : NEG_INF;
    if (after.finite() && st.val_after >= st.val_before)
        throw Error("es_step: value of the signature matrix did not decrease");
    if (after.finite() && !offsets_feasible(after, r.stamped.c, r.stamped.d))
        throw Error("es_step: stamped offsets are not dual feasible");

    r.step = st;
    r.converted.parent_step = std::make_shared<ConversionStep>(st);
    return r;
}

bool es_sigma_blockcheck(const DaeSystem& converted, const ConversionStep& step,
                         const Offsets& stamped) {
    const DaeSystem& parent = *converted.parent;
    int n = parent.n_eqs();
    SignatureMatrix sm = signature_matrix(converted);
    int N = sm.n;

    std::set<int> Lset(step.es_L.begin(), step.es_L.end());
    // Parent columns keep their indices in the converted system; each new
    // auxiliary sits at column_of({true, aux_idx}).
    auto aux_col = [&](int aux_idx) {
        return converted.column_of({true, aux_idx});
    };

    auto cell_ok = [&](int i, int j) -> bool {
        int s = sm.s[i][j];
        int slack_bound = stamped.d[j] - stamped.c[i];
        bool j_is_new_aux = false;
        int j_aux_idx = -1;
        for (auto& [col, aux_idx] : step.es_aux_of_column)
            if (aux_col(aux_idx) == j) {
                j_is_new_aux = true;
                j_aux_idx = aux_idx;
            }
        int pivot_col = step.pivot;

        if (i < n) {
            if (j_is_new_aux) return s <= slack_bound;          // <= C - c_i
            if (Lset.count(j)) return s < slack_bound;          // strict
            return s <= slack_bound;
        }
        // appended rows
        int k = i - n;
        auto [col_r, aux_r] = step.es_aux_of_column[k];
        if (j_is_new_aux)
            return j_aux_idx == aux_r ? s == 0 : s == NEG_INF;
        if (j == col_r || j == pivot_col) {
            if (col_r == pivot_col && j != pivot_col) return s == NEG_INF;  // g_l row
            return s == slack_bound;
        }
        if (col_r == pivot_col)  // g_l has no other variables
            return s == NEG_INF;
        if (Lset.count(j)) return s < slack_bound;
        return s <= slack_bound;
    };

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (!cell_ok(i, j)) return false;
    return true;
}

std::vector<Expression> es_recover(const DaeSystem& converted, const ConversionStep& step) {
    if (step.method != ConversionMethod::ES)
        throw Error("es_recover: not an ES step");
    if (is_identically_zero(step.u[step.pivot]))
        throw Error("es_recover: u_l is identically zero");
    if (!converted.parent) throw Error("es_recover: no parent system");
    const DaeSystem& parent = *converted.parent;
    int n = parent.n_eqs();
    int C = step.es_C;
    VarRef xl = parent.var_of_column(step.pivot);
    Expression xl_lead = Expression::var(xl, step.d_used[step.pivot] - C);

    std::map<int, Expression> def_of_aux;
    for (auto& [j, aux_idx] : step.es_aux_of_column) {
        if (j == step.pivot) {
            def_of_aux.emplace(aux_idx, xl_lead);
            continue;
        }
        VarRef xj = parent.var_of_column(j);
        Expression ratio = step.u[j] / step.u[step.pivot];
        def_of_aux.emplace(aux_idx,
                           Expression::var(xj, step.d_used[j] - C) - ratio * xl_lead);
    }

    std::vector<Expression> recovered;
    for (int i = 0; i < n; ++i) {
        Expression e = converted.eqs[i].expr;
        std::map<AtomId, Expression> subs;
        for (auto& [aux_idx, def] : def_of_aux) {
            int top = e.hod({true, aux_idx});
            for (int q = 0; q <= top; ++q) {
                AtomId target = atom_aux(aux_idx, q);
                if (e.depends_on(target))
                    subs.emplace(target, def.total_derivative(q));
            }
        }
        recovered.push_back(e.substitute_many(subs));
    }
    return recovered;
}

} // namespace sigreg
