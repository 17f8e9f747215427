#include "sigreg/lc.hpp"

#include <algorithm>

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

} // namespace

LcAnalysis lc_analyze(const DaeSystem& sys, const SignatureMatrix& sigma,
                      const Offsets& off, const std::vector<Expression>& u) {
    int n = sigma.n;
    if (static_cast<int>(u.size()) != n)
        throw Error("lc_analyze: u has wrong dimension");
    LcAnalysis a;
    a.u = u;
    a.offsets = off;
    for (int i = 0; i < n; ++i)
        if (!is_identically_zero(u[i])) a.I.push_back(i);
    if (a.I.size() < 2)
        throw Error("lc_analyze: u has fewer than two nonzero entries; "
                    "the Jacobian is structurally singular");
    a.theta = off.c[a.I[0]];
    for (int i : a.I) a.theta = std::min(a.theta, off.c[i]);
    for (int i : a.I)
        if (off.c[i] == a.theta) a.L.push_back(i);

    a.condition_ok = true;
    for (int j = 0; j < n; ++j) {
        LcSlack s;
        s.var_column = j;
        s.hod_u = vector_hod(u, sys.var_of_column(j));
        s.bound = off.d[j] - a.theta;
        s.ok = s.hod_u < s.bound;
        if (!s.ok) a.condition_ok = false;
        a.slack.push_back(s);
    }
    return a;
}

int lc_pick_pivot(const LcAnalysis& a) {
    for (int l : a.L)
        if (entry_always_nonzero(a.u[l])) return l;
    return a.L.front();
}

LcResult lc_step(const DaeSystem& sys, const SignatureMatrix& sigma,
                 const LcAnalysis& a, int l) {
    if (!a.condition_ok)
        throw Error("lc_step: sufficient condition violated; refusing the step");
    if (std::find(a.L.begin(), a.L.end(), l) == a.L.end())
        throw Error("lc_step: pivot " + std::to_string(l) + " is not in L");
    if (is_identically_zero(a.u[l]))
        throw Error("lc_step: u_l is identically zero");

    Expression fbar;
    for (int i : a.I)
        fbar = fbar + a.u[i] * sys.eqs[i].expr.total_derivative(a.offsets.c[i] - a.theta);

    LcResult r;
    r.converted = sys;
    r.converted.eqs[l].expr = fbar;
    r.converted.eqs[l].raw = nullptr;
    r.converted.parent = std::make_shared<DaeSystem>(sys);

    ConversionStep st;
    st.method = ConversionMethod::LC;
    st.u = a.u;
    st.pivot = l;
    st.replaced = {l};
    st.equivalence_condition = a.u[l];
    st.always_nonzero = entry_always_nonzero(a.u[l]);
    st.val_before = sigma.val;
    st.c_used = a.offsets.c;
    st.d_used = a.offsets.d;
    st.index_set_I = a.I;
    st.theta = a.theta;
    st.candidate_set_L = a.L;

    SignatureMatrix after = signature_matrix(r.converted);
    st.val_after = after.finite() ? after.val : NEG_INF;
    if (after.finite() && st.val_after >= st.val_before)
        throw Error("lc_step: value of the signature matrix did not decrease");

    r.step = st;
    r.converted.parent_step = std::make_shared<ConversionStep>(st);
    return r;
}

bool detect_ill_posed(const DaeSystem& converted) {
    return !signature_matrix(converted).finite();
}

Expression lc_recover(const DaeSystem& converted, const ConversionStep& step) {
    if (step.method != ConversionMethod::LC)
        throw Error("lc_recover: not an LC step");
    int l = step.pivot;
    if (is_identically_zero(step.u[l]))
        throw Error("lc_recover: u_l is identically zero");
    Expression acc = converted.eqs[l].expr;
    for (int i : step.index_set_I) {
        if (i == l) continue;
        // converted equations other than l coincide with the parent's
        acc = acc - step.u[i] * converted.eqs[i].expr.total_derivative(step.c_used[i] - step.theta);
    }
    return acc / step.u[l];
}

} // namespace sigreg
