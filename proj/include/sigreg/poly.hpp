#pragma once

#include "sigreg/atom.hpp"

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

namespace sigreg {

/// Power product of atoms; factors sorted ascending by atom_cmp, exponents > 0.
struct Monomial {
    std::vector<std::pair<AtomId, int>> f;

    bool is_one() const { return f.empty(); }
    int degree() const;
    int exponent(AtomId a) const;
    friend bool operator==(const Monomial&, const Monomial&);
};

/// Graded order: total degree first, then lexicographic scanning from the
/// highest atom down. Returns <0, 0, >0.
int mono_cmp(const Monomial& a, const Monomial& b);

Monomial mono_mul(const Monomial& a, const Monomial& b);
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b);
Monomial mono_gcd(const Monomial& a, const Monomial& b);

struct Term {
    Monomial m;
    mpq_class c;
};

/// Multivariate polynomial over atoms with exact rational coefficients.
/// Terms kept sorted descending by mono_cmp; no zero coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(const mpq_class& c);
    static Poly atom(AtomId a, int exp = 1);

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    std::optional<mpq_class> as_constant() const;
    const Term& lead() const { return t_.front(); }
    int term_count() const { return static_cast<int>(t_.size()); }
    int degree() const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly mul_term(const Monomial& m, const mpq_class& c) const;
    Poly pow(int e) const;

    /// Exact division; nullopt if `d` does not divide `*this`.
    std::optional<Poly> divide(const Poly& d) const;

    /// Remainder of normal-form reduction by d (full multivariate reduction).
    Poly reduce_mod(const Poly& d) const;

    /// Rational content (gcd of coefficients with the sign of the leading
    /// coefficient); zero polynomial has content 0.
    mpq_class content() const;
    /// Common monomial factor of all terms (one if constant term present).
    Monomial monomial_content() const;

    Poly scaled(const mpq_class& c) const;
    Poly div_monomial(const Monomial& m) const;

    /// All atoms appearing in the polynomial (no recursion into composite
    /// atoms' arguments).
    void collect_atoms(std::vector<AtomId>& out) const;

    friend bool operator==(const Poly& a, const Poly& b);

    // Construction helper for code that assembles terms directly.
    static Poly from_terms(std::vector<Term> terms);

private:
    std::vector<Term> t_;
};

} // namespace sigreg
