#pragma once

#include "sigreg/es.hpp"
#include "sigreg/lc.hpp"

namespace sigreg {

enum class Verdict {
    Success,
    IdenticallySingular,    // SA failed, no conversion attempted/possible
    StructurallySingular,
    StructurallyIllPosed,   // original system proven ill posed
    ConversionStuck,
    CancellationDetected,   // formal/true signature mismatch, re-analyzed
};

const char* verdict_name(Verdict v);

struct IterationRecord {
    SignatureMatrix sigma;
    Offsets offsets;
    int index = 0;               // unreliable unless the Jacobian is nonsingular
    long long dof = 0;
    Classification cls = Classification::GenericallyNonsingular;
    std::optional<Expression> det;
    // conversion applied after this analysis, if any
    std::shared_ptr<const ConversionStep> step;
    // condition diagnostics when a method was refused at this iteration
    std::optional<LcAnalysis> lc_refused;
    std::optional<EsAnalysis> es_refused;
};

struct EquivalenceEntry {
    Expression condition;   // u_l of a step; nonzero required
    bool always_nonzero = false;
};

struct AnalysisReport {
    std::vector<IterationRecord> iterations;
    Verdict verdict = Verdict::Success;
    std::vector<EquivalenceEntry> ledger;
    std::shared_ptr<const DaeSystem> final_system;
    std::optional<FormalReport> formal;      // present when cancellation was detected
    std::string detail;                      // human-readable notes
};

enum class Policy { LcFirst, EsFirst, LcOnly, EsOnly };

struct PipelineOptions {
    Policy policy = Policy::LcFirst;
    int max_iters = -1;                      // default: Val of the initial sigma
    int det_bound = 12;
    std::optional<Offsets> user_offsets;     // validated, then used instead of canonical
    std::optional<std::vector<Expression>> user_u;  // kernel vector override (first step)
    int pivot = -1;                          // pivot override (first step)
    std::vector<Expression> reductions;      // declared substitutions rel = 0
    std::uint64_t seed = 20240901;
};

/// Single structural-analysis pass, no conversion.
AnalysisReport analyze(const DaeSystem& sys, const PipelineOptions& opt = {});

/// Iterate conversion steps until the Jacobian is generically nonsingular,
/// the system is proven ill posed, or no method applies.
AnalysisReport regularize(const DaeSystem& sys, const PipelineOptions& opt = {});

struct SchemeStage {
    int k = 0;
    std::vector<std::pair<int, int>> equations;  // (equation index, differentiation order)
    std::vector<std::pair<int, int>> unknowns;   // (variable column, derivative order)
};

struct SolutionScheme {
    int k_min = 0;
    int k_max = 0;
    std::vector<SchemeStage> stages;
};

SolutionScheme solution_scheme(const DaeSystem& sys, const SignatureMatrix& sigma,
                               const Offsets& off, int horizon = 0);

struct StageResidual {
    int k = 0;
    int eq = 0;
    int order = 0;
    double residual = 0.0;
    double scale = 1.0;
};

struct SuccessCheck {
    std::vector<StageResidual> residuals;
    double det = 0.0;
    double tol_r = 1e-9;
    double tol_s = 0.0;
    bool success = false;
    std::string detail;
};

/// Evaluate the stage equations f_i^{(c_i+k)} for k_min <= k <= 0 at p and
/// test |residual| <= tol_r (relative) and |det J(p)| > tol_s.
SuccessCheck success_check(const DaeSystem& sys, const SignatureMatrix& sigma,
                           const Offsets& off, const ValuePoint& p,
                           double tol_r = 1e-9, double tol_s = -1.0,
                           int det_bound = 12);

} // namespace sigreg
