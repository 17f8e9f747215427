#pragma once

#include "sigreg/sigma.hpp"

#include <optional>
#include <vector>

namespace sigreg {

enum class Classification {
    GenericallyNonsingular,
    IdenticallySingular,
    StructurallySingular,
};

const char* classification_name(Classification c);

struct SystemJacobian {
    int n = 0;
    std::vector<std::vector<Expression>> entries;
    Offsets offsets;
    Classification cls = Classification::GenericallyNonsingular;
    std::optional<Expression> det;  // computed for n <= det_bound

    const Expression& at(int i, int j) const { return entries[i][j]; }
};

/// J_ij = d f_i / d x_j^(d_j - c_i): the partial of f_i with respect to the
/// leading derivative where d_j - c_i = sigma_ij, zero elsewhere.
SystemJacobian system_jacobian(const DaeSystem& sys, const SignatureMatrix& sigma,
                               const Offsets& off, int det_bound = 12,
                               const std::vector<Expression>* reduce_by = nullptr);

Classification classify(const std::vector<std::vector<Expression>>& m,
                        std::optional<Expression>* det_out, int det_bound);

/// Fraction-free Bareiss determinant with symbolic pivoting (pivot with the
/// fewest monomials, ties by lowest row then column).
Expression symbolic_det(const std::vector<std::vector<Expression>>& m);

/// Rank by exact elimination; used instead of the determinant when n is
/// large.
int symbolic_rank(const std::vector<std::vector<Expression>>& m);

enum class KernelSide { Left, Right };

/// One null-space vector of J (Right: Ju = 0) or of J^T (Left: J^T u = 0),
/// polynomial entries in simplest form (denominators cleared, no common
/// content or monomial factor), deterministic. nullopt when the kernel is
/// trivial.
std::optional<std::vector<Expression>>
null_vector(const std::vector<std::vector<Expression>>& m, KernelSide side);

/// Floating determinant via LU with partial pivoting.
double numeric_det(const SystemJacobian& J, const ValuePoint& p);

/// Max row sum of |entries| at p (for the success-check tolerance).
double numeric_inf_norm(const SystemJacobian& J, const ValuePoint& p);

/// Residual of J^T u (Left) or J u (Right); all components identically zero
/// iff u is a kernel vector.
bool check_kernel(const std::vector<std::vector<Expression>>& m,
                  const std::vector<Expression>& u, KernelSide side);

} // namespace sigreg
