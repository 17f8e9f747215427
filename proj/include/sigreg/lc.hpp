#pragma once

#include "sigreg/jacobian.hpp"

namespace sigreg {

struct LcSlack {
    int var_column = 0;
    int hod_u = NEG_INF;       // highest derivative of x_j across u's entries
    int bound = 0;             // d_j - theta; the condition needs hod_u < bound
    bool ok = true;
};

struct LcAnalysis {
    std::vector<Expression> u;     // left null vector of J
    std::vector<int> I;            // rows with u_i not identically zero
    int theta = 0;                 // min c_i over I
    std::vector<int> L;            // rows of I with c_i = theta
    bool condition_ok = false;
    std::vector<LcSlack> slack;    // per-variable margin report
    Offsets offsets;
};

/// Check the LC applicability condition for a left kernel vector u.
/// Throws if u has fewer than two nonzero entries (the system would be
/// structurally singular).
LcAnalysis lc_analyze(const DaeSystem& sys, const SignatureMatrix& sigma,
                      const Offsets& off, const std::vector<Expression>& u);

/// Preferred pivot: an l in L with identically nonzero constant u_l, smallest
/// index; otherwise the smallest index in L.
int lc_pick_pivot(const LcAnalysis& a);

struct LcResult {
    DaeSystem converted;
    ConversionStep step;
};

/// Replace f_l by sum over I of u_i * f_i^{(c_i - theta)}. Refuses (throws)
/// when the sufficient condition does not hold or l is not in L; the strict
/// Val decrease is asserted on the result.
LcResult lc_step(const DaeSystem& sys, const SignatureMatrix& sigma,
                 const LcAnalysis& a, int l);

/// True iff the converted system lost its finite transversal; the original
/// system is then ill posed.
bool detect_ill_posed(const DaeSystem& converted);

/// Reconstruct the replaced equation from the converted system,
/// f_l = (f̄_l - sum_{i in I, i != l} u_i f_i^{(c_i - theta)}) / u_l.
Expression lc_recover(const DaeSystem& converted, const ConversionStep& step);

} // namespace sigreg
