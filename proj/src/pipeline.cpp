#include "sigreg/pipeline.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

namespace sigreg {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Success: return "success";
    case Verdict::IdenticallySingular: return "identically-singular";
    case Verdict::StructurallySingular: return "structurally-singular";
    case Verdict::StructurallyIllPosed: return "ill-posed";
    case Verdict::ConversionStuck: return "conversion-stuck";
    case Verdict::CancellationDetected: return "cancellation-detected";
    }
    return "?";
}

namespace {

Offsets offsets_for(const SignatureMatrix& sm, const PipelineOptions& opt) {
    if (opt.user_offsets) {
        if (!validate_offsets(sm, opt.user_offsets->c, opt.user_offsets->d))
            throw Error("user-supplied offsets are not valid for this system");
        Offsets off = *opt.user_offsets;
        off.canonical = false;
        return off;
    }
    return canonical_offsets(sm);
}

IterationRecord analyze_once(const DaeSystem& sys, const PipelineOptions& opt) {
    IterationRecord rec;
    rec.sigma = signature_matrix(sys);
    if (!rec.sigma.finite()) return rec;
    rec.offsets = offsets_for(rec.sigma, opt);
    rec.index = structural_index(rec.sigma, rec.offsets);
    rec.dof = dof(rec.sigma);
    SystemJacobian J = system_jacobian(sys, rec.sigma, rec.offsets, opt.det_bound,
                                       opt.reductions.empty() ? nullptr : &opt.reductions);
    rec.cls = J.cls;
    rec.det = J.det;
    return rec;
}

} // namespace

AnalysisReport analyze(const DaeSystem& sys, const PipelineOptions& opt) {
    AnalysisReport rep;
    rep.final_system = std::make_shared<DaeSystem>(sys);

    FormalReport fr = formal_vs_true(sys);
    if (fr.differ && fr.alternative == 2) {
        // Formal analysis would fail on cancellations; report it and analyze
        // the simplified (normal form) system, which parsing already gives us.
        rep.formal = fr;
        rep.verdict = Verdict::CancellationDetected;
        rep.detail = "formal signature overestimates the true one "
                     "(hidden cancellation); re-analyzed on simplified equations";
    }

    IterationRecord rec = analyze_once(sys, opt);
    if (!rec.sigma.finite()) {
        rep.iterations.push_back(std::move(rec));
        rep.verdict = Verdict::StructurallyIllPosed;
        rep.detail = "no finite transversal in the signature matrix";
        return rep;
    }
    rep.iterations.push_back(rec);
    if (rep.verdict != Verdict::CancellationDetected) {
        switch (rec.cls) {
        case Classification::GenericallyNonsingular:
            rep.verdict = Verdict::Success;
            break;
        case Classification::IdenticallySingular:
            rep.verdict = Verdict::IdenticallySingular;
            break;
        case Classification::StructurallySingular:
            rep.verdict = Verdict::StructurallySingular;
            break;
        }
    }
    return rep;
}

namespace {

// Try one LC step; on condition failure records diagnostics and returns
// nothing.
std::optional<LcResult> try_lc(const DaeSystem& sys, const IterationRecord& rec,
                               IterationRecord& diag, const PipelineOptions& opt,
                               bool first_step) {
    SystemJacobian J = system_jacobian(sys, rec.sigma, rec.offsets, opt.det_bound,
                                       opt.reductions.empty() ? nullptr : &opt.reductions);
    std::vector<Expression> u;
    if (first_step && opt.user_u) {
        u = *opt.user_u;
        if (!check_kernel(J.entries, u, KernelSide::Left))
            throw Error("user-supplied u is not a left null vector of the Jacobian");
    } else {
        auto k = null_vector(J.entries, KernelSide::Left);
        if (!k) return std::nullopt;
        u = std::move(*k);
    }
    LcAnalysis a = lc_analyze(sys, rec.sigma, rec.offsets, u);
    if (!a.condition_ok) {
        diag.lc_refused = a;
        return std::nullopt;
    }
    int l = (first_step && opt.pivot >= 0) ? opt.pivot : lc_pick_pivot(a);
    return lc_step(sys, rec.sigma, a, l);
}

std::optional<EsResult> try_es(const DaeSystem& sys, const IterationRecord& rec,
                               IterationRecord& diag, const PipelineOptions& opt,
                               bool first_step) {
    SystemJacobian J = system_jacobian(sys, rec.sigma, rec.offsets, opt.det_bound,
                                       opt.reductions.empty() ? nullptr : &opt.reductions);
    std::vector<Expression> u;
    if (first_step && opt.user_u) {
        u = *opt.user_u;
        if (!check_kernel(J.entries, u, KernelSide::Right))
            throw Error("user-supplied u is not a right null vector of the Jacobian");
    } else {
        auto k = null_vector(J.entries, KernelSide::Right);
        if (!k) return std::nullopt;
        u = std::move(*k);
    }
    EsAnalysis a = es_analyze(sys, rec.sigma, rec.offsets, u);
    if (!a.cond_hod_ok || !a.cond_order_ok) {
        diag.es_refused = a;
        return std::nullopt;
    }
    int l = (first_step && opt.pivot >= 0) ? opt.pivot : es_pick_pivot(a);
    return es_step(sys, rec.sigma, a, l);
}

} // namespace

AnalysisReport regularize(const DaeSystem& sys, const PipelineOptions& opt) {
    AnalysisReport rep;
    DaeSystem cur = sys;

    FormalReport fr = formal_vs_true(sys);
    bool cancellation = fr.differ && fr.alternative == 2;
    if (cancellation) rep.formal = fr;

    long long initial_val = 0;
    {
        SignatureMatrix s0 = signature_matrix(sys);
        if (s0.finite()) initial_val = s0.val;
    }
    int max_iters = opt.max_iters >= 0 ? opt.max_iters
                                       : static_cast<int>(std::max<long long>(1, initial_val));

    bool first_step = true;
    for (int iter = 0; iter <= max_iters; ++iter) {
        IterationRecord rec = analyze_once(cur, opt);
        if (!rec.sigma.finite()) {
            rep.iterations.push_back(std::move(rec));
            rep.verdict = Verdict::StructurallyIllPosed;
            rep.detail = "conversion produced a structurally ill-posed system; "
                         "the original system is ill posed";
            break;
        }
        if (rec.cls == Classification::GenericallyNonsingular) {
            rep.iterations.push_back(std::move(rec));
            rep.verdict = cancellation ? Verdict::CancellationDetected : Verdict::Success;
            break;
        }
        if (iter == max_iters) {
            rep.iterations.push_back(std::move(rec));
            rep.verdict = Verdict::ConversionStuck;
            rep.detail = "iteration limit reached";
            break;
        }

        std::optional<LcResult> lc_res;
        std::optional<EsResult> es_res;
        bool lc_allowed = opt.policy != Policy::EsOnly;
        bool es_allowed = opt.policy != Policy::LcOnly;
        bool lc_first = opt.policy == Policy::LcFirst || opt.policy == Policy::LcOnly;

        try {
            if (lc_first) {
                if (lc_allowed) lc_res = try_lc(cur, rec, rec, opt, first_step);
                if (!lc_res && es_allowed) es_res = try_es(cur, rec, rec, opt, first_step);
            } else {
                if (es_allowed) es_res = try_es(cur, rec, rec, opt, first_step);
                if (!es_res && lc_allowed) lc_res = try_lc(cur, rec, rec, opt, first_step);
            }
        } catch (const Error& e) {
            rep.iterations.push_back(std::move(rec));
            rep.verdict = Verdict::ConversionStuck;
            rep.detail = e.what();
            break;
        }
        first_step = false;

        if (!lc_res && !es_res) {
            rep.iterations.push_back(std::move(rec));
            rep.verdict = rec.cls == Classification::StructurallySingular
                              ? Verdict::StructurallySingular
                              : Verdict::ConversionStuck;
            if (rep.detail.empty())
                rep.detail = "no conversion method's conditions hold";
            break;
        }

        if (lc_res) {
            rec.step = std::make_shared<ConversionStep>(lc_res->step);
            rep.ledger.push_back({lc_res->step.equivalence_condition,
                                  lc_res->step.always_nonzero});
            cur = std::move(lc_res->converted);
        } else {
            rec.step = std::make_shared<ConversionStep>(es_res->step);
            rep.ledger.push_back({es_res->step.equivalence_condition,
                                  es_res->step.always_nonzero});
            cur = std::move(es_res->converted);
        }
        rep.iterations.push_back(std::move(rec));
    }

    rep.final_system = std::make_shared<DaeSystem>(std::move(cur));
    return rep;
}

SolutionScheme solution_scheme(const DaeSystem& sys, const SignatureMatrix& sigma,
                               const Offsets& off, int horizon) {
    if (!sigma.finite()) throw Error("solution_scheme: structurally ill-posed");
    SolutionScheme sch;
    int dmax = 0;
    for (int dj : off.d) dmax = std::max(dmax, dj);
    sch.k_min = -dmax;
    sch.k_max = horizon;
    for (int k = sch.k_min; k <= sch.k_max; ++k) {
        SchemeStage st;
        st.k = k;
        for (int i = 0; i < sigma.n; ++i)
            if (off.c[i] + k >= 0) st.equations.emplace_back(i, off.c[i] + k);
        for (int j = 0; j < sigma.n; ++j)
            if (off.d[j] + k >= 0) st.unknowns.emplace_back(j, off.d[j] + k);
        sch.stages.push_back(std::move(st));
    }
    (void)sys;
    return sch;
}

namespace {

// Evaluate with a magnitude estimate: value plus the sum of absolute values
// of the evaluated monomials, used as the relative-residual scale.
std::pair<double, double> eval_with_mass(const Expression& e, const ValuePoint& p) {
    double mass = 0.0;
    auto poly_eval = [&](const Poly& poly) {
        double total = 0.0;
        for (const Term& t : poly.terms()) {
            Expression term_expr = Expression::make(Poly::from_terms({t}), Poly(mpq_class(1)));
            double v = term_expr.evaluate(p).as_double();
            mass += std::abs(v);
            total += v;
        }
        return total;
    };
    double n = poly_eval(e.num());
    double d = poly_eval(e.den());
    if (d == 0.0) throw Error("evaluate: denominator is zero at the value point");
    return {n / d, mass};
}

} // namespace

SuccessCheck success_check(const DaeSystem& sys, const SignatureMatrix& sigma,
                           const Offsets& off, const ValuePoint& p, double tol_r,
                           double tol_s, int det_bound) {
    SuccessCheck out;
    out.tol_r = tol_r;
    SystemJacobian J = system_jacobian(sys, sigma, off, det_bound);
    out.det = numeric_det(J, p);
    if (tol_s < 0) {
        double norm = numeric_inf_norm(J, p);
        tol_s = 1e3 * DBL_EPSILON * std::max(norm, 1.0);
    }
    out.tol_s = tol_s;

    bool residuals_ok = true;
    int dmax = 0;
    for (int dj : off.d) dmax = std::max(dmax, dj);
    for (int k = -dmax; k <= 0; ++k) {
        for (int i = 0; i < sigma.n; ++i) {
            int ord = off.c[i] + k;
            if (ord < 0) continue;
            Expression fik = sys.eqs[i].expr.total_derivative(ord);
            auto [val, mass] = eval_with_mass(fik, p);
            StageResidual r;
            r.k = k;
            r.eq = i;
            r.order = ord;
            r.residual = val;
            r.scale = std::max(1.0, mass);
            if (std::abs(val) > tol_r * r.scale) residuals_ok = false;
            out.residuals.push_back(r);
        }
    }

    bool det_ok = std::abs(out.det) > out.tol_s;
    if (J.cls != Classification::GenericallyNonsingular) {
        det_ok = false;
        out.detail = "system Jacobian is not generically nonsingular";
    }
    out.success = residuals_ok && det_ok;
    if (!out.success && out.detail.empty())
        out.detail = residuals_ok ? "Jacobian numerically singular at the point"
                                  : "stage residuals exceed tolerance";
    return out;
}

} // namespace sigreg
