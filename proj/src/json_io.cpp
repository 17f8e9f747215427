#include "sigreg/json_io.hpp"

namespace sigreg {

namespace {

json sig_entry(int s) {
    if (s == NEG_INF) return nullptr;
    return s;
}

json expr_json(const Expression& e, const std::function<std::string(VarRef)>& names) {
    return e.str(names);
}

} // namespace

json sigma_to_json(const DaeSystem& sys, const SignatureMatrix& sigma,
                   const Offsets* off) {
    json j;
    j["n"] = sigma.n;
    j["variables"] = json::array();
    for (int c = 0; c < sigma.n; ++c)
        j["variables"].push_back(sys.var_name(sys.var_of_column(c)));
    j["equations"] = json::array();
    for (auto& e : sys.eqs) j["equations"].push_back(e.name);
    j["sigma"] = json::array();
    for (int i = 0; i < sigma.n; ++i) {
        json row = json::array();
        for (int c = 0; c < sigma.n; ++c) row.push_back(sig_entry(sigma.s[i][c]));
        j["sigma"].push_back(row);
    }
    if (sigma.finite()) {
        j["val"] = sigma.val;
        j["hvt"] = *sigma.hvt;
    } else {
        j["val"] = nullptr;
    }
    if (off) {
        j["c"] = off->c;
        j["d"] = off->d;
        j["index"] = structural_index(sigma, *off);
        j["dof"] = dof(sigma);
    }
    return j;
}

json system_to_json(const DaeSystem& sys) {
    json j;
    j["name"] = sys.name;
    j["states"] = sys.state_names;
    j["aux"] = sys.aux_names;
    json funcs = json::array();
    for (auto& f : sys.funcs) funcs.push_back({{"name", f.name}, {"arity", f.arity}});
    j["functions"] = funcs;
    j["inputs"] = sys.inputs;
    json consts = json::array();
    for (auto& c : sys.consts) {
        json cj;
        cj["name"] = c.name;
        cj["value"] = c.value ? json(c.value->get_str()) : json(nullptr);
        consts.push_back(cj);
    }
    j["consts"] = consts;
    auto names = sys.namer();
    json eqs = json::array();
    for (auto& e : sys.eqs)
        eqs.push_back({{"name", e.name}, {"expr", e.expr.str(names)}});
    j["equations"] = eqs;
    return j;
}

json jacobian_to_json(const DaeSystem& sys, const SystemJacobian& J) {
    json j;
    auto names = sys.namer();
    j["classification"] = classification_name(J.cls);
    json rows = json::array();
    for (int i = 0; i < J.n; ++i) {
        json row = json::array();
        for (int c = 0; c < J.n; ++c) row.push_back(expr_json(J.entries[i][c], names));
        rows.push_back(row);
    }
    j["entries"] = rows;
    if (J.det) j["det"] = expr_json(*J.det, names);
    return j;
}

json report_to_json(const DaeSystem& sys, const AnalysisReport& rep) {
    json j;
    j["verdict"] = verdict_name(rep.verdict);
    if (!rep.detail.empty()) j["detail"] = rep.detail;

    std::vector<const DaeSystem*> chain{&sys};
    std::vector<const DaeSystem*> back;
    for (const DaeSystem* s = rep.final_system.get(); s && s != &sys; s = s->parent.get())
        back.push_back(s);
    for (auto it = back.rbegin(); it != back.rend(); ++it) chain.push_back(*it);

    json iters = json::array();
    for (size_t k = 0; k < rep.iterations.size(); ++k) {
        const IterationRecord& rec = rep.iterations[k];
        const DaeSystem& s = k < chain.size() ? *chain[k] : *rep.final_system;
        json it;
        it["sigma"] = sigma_to_json(s, rec.sigma, rec.sigma.finite() ? &rec.offsets : nullptr);
        if (rec.sigma.finite()) {
            it["classification"] = classification_name(rec.cls);
            it["index_reliable"] = rec.cls == Classification::GenericallyNonsingular;
            if (rec.det) it["det"] = rec.det->str(s.namer());
        }
        if (rec.lc_refused) {
            json slack = json::array();
            for (auto& sl : rec.lc_refused->slack)
                slack.push_back({{"variable", s.var_name(s.var_of_column(sl.var_column))},
                                 {"hod_u", sl.hod_u == NEG_INF ? json(nullptr) : json(sl.hod_u)},
                                 {"bound", sl.bound},
                                 {"ok", sl.ok}});
            it["lc_refused"] = {{"slack", slack}};
        }
        if (rec.es_refused) {
            json margins = json::array();
            for (auto& m : rec.es_refused->order_margins)
                margins.push_back({{"variable", s.var_name(s.var_of_column(m.var_column))},
                                   {"d_minus_C", m.margin},
                                   {"ok", m.ok}});
            it["es_refused"] = {{"order_margins", margins}};
        }
        if (rec.step) {
            const ConversionStep& st = *rec.step;
            auto snames = s.namer();
            json stj;
            stj["method"] = st.method == ConversionMethod::LC ? "lc" : "es";
            json u = json::array();
            for (auto& e : st.u) u.push_back(e.str(snames));
            auto one_based = [](const std::vector<int>& v) {
                json a = json::array();
                for (int x : v) a.push_back(x + 1);
                return a;
            };
            stj["u"] = u;
            stj["pivot"] = st.pivot + 1;
            stj["val_before"] = st.val_before;
            stj["val_after"] = st.val_after == NEG_INF ? json(nullptr) : json(st.val_after);
            stj["equivalence_condition"] = st.equivalence_condition.str(snames);
            stj["always_nonzero"] = st.always_nonzero;
            if (st.method == ConversionMethod::LC) {
                stj["I"] = one_based(st.index_set_I);
                stj["theta"] = st.theta;
                stj["L"] = one_based(st.candidate_set_L);
            } else {
                stj["L"] = one_based(st.es_L);
                stj["s"] = st.es_L.size();
                stj["I"] = one_based(st.es_I);
                stj["C"] = st.es_C;
                stj["added"] = st.added;
                json subs = json::array();
                for (auto& sub : st.substitutions)
                    subs.push_back({{"equation", sub.eq},
                                    {"variable", s.var_name(sub.var)},
                                    {"order", sub.order}});
                stj["substitutions"] = subs;
            }
            it["step"] = stj;
        }
        iters.push_back(it);
    }
    j["iterations"] = iters;

    json ledger = json::array();
    auto fnames = rep.final_system ? rep.final_system->namer() : sys.namer();
    for (auto& e : rep.ledger)
        ledger.push_back({{"condition", e.condition.str(fnames)},
                          {"always_nonzero", e.always_nonzero}});
    j["equivalence_ledger"] = ledger;
    if (rep.formal) {
        j["formal_vs_true"] = {
            {"differ", rep.formal->differ},
            {"alternative", rep.formal->alternative},
            {"formal_val", rep.formal->formal.finite() ? json(rep.formal->formal.val) : json(nullptr)},
            {"true_val", rep.formal->true_sigma.finite() ? json(rep.formal->true_sigma.val) : json(nullptr)},
        };
    }
    if (rep.final_system) j["final_system"] = system_to_json(*rep.final_system);
    return j;
}

json scheme_to_json(const DaeSystem& sys, const SolutionScheme& sch) {
    json j;
    j["k_min"] = sch.k_min;
    j["k_max"] = sch.k_max;
    json stages = json::array();
    for (auto& st : sch.stages) {
        json s;
        s["k"] = st.k;
        json eqs = json::array();
        for (auto& [i, ord] : st.equations)
            eqs.push_back({{"equation", sys.eqs[i].name}, {"order", ord}});
        json vars = json::array();
        for (auto& [c, ord] : st.unknowns)
            vars.push_back({{"variable", sys.var_name(sys.var_of_column(c))}, {"order", ord}});
        s["solve"] = eqs;
        s["for"] = vars;
        stages.push_back(s);
    }
    j["stages"] = stages;
    return j;
}

json check_to_json(const DaeSystem& sys, const SuccessCheck& chk) {
    json j;
    j["success"] = chk.success;
    j["det"] = chk.det;
    j["tol_r"] = chk.tol_r;
    j["tol_s"] = chk.tol_s;
    if (!chk.detail.empty()) j["detail"] = chk.detail;
    json res = json::array();
    for (auto& r : chk.residuals)
        res.push_back({{"k", r.k},
                       {"equation", sys.eqs[r.eq].name},
                       {"order", r.order},
                       {"residual", r.residual}});
    j["residuals"] = res;
    return j;
}

} // namespace sigreg
