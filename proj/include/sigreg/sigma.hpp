#pragma once

#include "sigreg/dae.hpp"

#include <optional>
#include <vector>

namespace sigreg {

/// Signature matrix: entry is the highest order of derivative of variable j
/// in equation i, or NEG_INF when absent. hvt maps row -> column when a
/// finite transversal exists.
struct SignatureMatrix {
    int n = 0;
    std::vector<std::vector<int>> s;
    std::optional<std::vector<int>> hvt;
    long long val = NEG_INF;

    bool finite() const { return hvt.has_value(); }
    int at(int i, int j) const { return s[i][j]; }
};

struct Offsets {
    std::vector<int> c;
    std::vector<int> d;
    bool canonical = false;
};

SignatureMatrix signature_matrix(const DaeSystem& sys);

/// Signature matrix from the unnormalized parse trees (formal HODs). Falls
/// back to the normalized entries for equations without a raw tree.
SignatureMatrix formal_signature_matrix(const DaeSystem& sys);

/// Exhaustive HVT oracle for n <= 8; ties broken by the lexicographically
/// smallest row-to-column map. Returns nullopt when no finite transversal
/// exists.
std::optional<std::pair<long long, std::vector<int>>>
hvt_bruteforce(const SignatureMatrix& sigma);

/// Assignment solver over the finite entries (no big-M); same tie-break as
/// the oracle.
std::optional<std::pair<long long, std::vector<int>>>
solve_hvt(const std::vector<std::vector<int>>& s);

/// Smallest valid offsets (fixed-point iteration), requires finite Val.
Offsets canonical_offsets(const SignatureMatrix& sigma);

/// Valid offsets: c >= 0, d_j - c_i >= sigma_ij, equality on a HVT.
bool validate_offsets(const SignatureMatrix& sigma, const std::vector<int>& c,
                      const std::vector<int>& d);

/// Dual feasibility only (no tightness requirement).
bool offsets_feasible(const SignatureMatrix& sigma, const std::vector<int>& c,
                      const std::vector<int>& d);

int structural_index(const SignatureMatrix& sigma, const Offsets& off);
long long dof(const SignatureMatrix& sigma);

struct FormalReport {
    SignatureMatrix formal;
    SignatureMatrix true_sigma;
    bool differ = false;
    // Theorem alternatives when the matrices differ:
    //   1: equal values (formal offsets remain valid for the true sigma)
    //   2: formal value exceeds true value (formal Jacobian structurally singular)
    int alternative = 0;
};

FormalReport formal_vs_true(const DaeSystem& sys);

/// Formal highest order of derivative of v in a raw tree.
int formal_hod(const RawNode& n, VarRef v);

} // namespace sigreg
