#pragma once

#include "sigreg/jacobian.hpp"

namespace sigreg {

struct EsOrderMargin {
    int var_column = 0;
    int margin = 0;  // d_j - C, must be >= 0 for columns in L
    bool ok = true;
};

struct EsHodMargin {
    int var_column = 0;
    int hod_u = NEG_INF;
    int bound = 0;  // d_j - C - 1 for j in L, d_j - C otherwise
    bool ok = true;
};

struct EsAnalysis {
    std::vector<Expression> u;  // right null vector of J
    std::vector<int> L;         // columns with u_j not identically zero
    int s = 0;                  // |L|, at least 2
    std::vector<int> I;         // rows with a tight entry in some column of L
    int C = 0;                  // max c_i over I
    bool cond_hod_ok = false;
    bool cond_order_ok = false;
    std::vector<EsHodMargin> hod_margins;
    std::vector<EsOrderMargin> order_margins;
    Offsets offsets;
};

EsAnalysis es_analyze(const DaeSystem& sys, const SignatureMatrix& sigma,
                      const Offsets& off, const std::vector<Expression>& u);

int es_pick_pivot(const EsAnalysis& a);

struct EsResult {
    DaeSystem converted;      // g_l and y_l omitted unless keep_gl
    ConversionStep step;
    Offsets stamped;          // offsets prescribed for the converted system
};

/// One expression-substitution step: introduce auxiliaries for the columns of
/// L except the pivot, replace the leading derivatives in the rows of I, and
/// append the prescribing equations. Refuses (throws) when either condition
/// fails; the strict Val decrease is asserted on the result.
EsResult es_step(const DaeSystem& sys, const SignatureMatrix& sigma,
                 const EsAnalysis& a, int l, bool keep_gl = false);

/// Verify the block relations of the converted signature matrix against the
/// stamped offsets (strict bound on the substituted columns, equalities on
/// the prescribing rows, minus-infinity where stamped).
bool es_sigma_blockcheck(const DaeSystem& converted, const ConversionStep& step,
                         const Offsets& stamped);

/// Substitute the auxiliary definitions back; returns the recovered versions
/// of the first n equations (identically equal to the originals).
std::vector<Expression> es_recover(const DaeSystem& converted, const ConversionStep& step);

} // namespace sigreg
