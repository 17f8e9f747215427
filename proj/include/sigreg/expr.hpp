#pragma once

#include "sigreg/poly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace sigreg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int NEG_INF = INT_MIN;

class ValuePoint;
struct Value;

/// Exact rational normal form num/den over the atom algebra. Immutable and
/// cheap to copy. The denominator is a primitive integer polynomial with a
/// positive leading coefficient; algebraically equal inputs over the
/// supported algebra map to identical representations.
class Expression {
public:
    Expression();                           // zero
    explicit Expression(const mpq_class& c);
    explicit Expression(long c);
    static Expression atom(AtomId a);
    static Expression var(VarRef v, int order = 0);
    static Expression time();
    static Expression param(const std::string& name);
    static Expression make(Poly num, Poly den);

    const Poly& num() const;
    const Poly& den() const;
    bool is_zero() const { return num().is_zero(); }
    bool is_polynomial() const;
    std::optional<mpq_class> as_constant() const;  // nullopt unless den==1-form constant

    Expression operator-() const;
    Expression operator+(const Expression& o) const;
    Expression operator-(const Expression& o) const;
    Expression operator*(const Expression& o) const;
    Expression operator/(const Expression& o) const;  // throws on identically zero divisor
    Expression pow(int e) const;

    /// d^p/dt^p with product/chain rules; always defined on the algebra.
    Expression total_derivative(int p = 1) const;

    /// Formal partial derivative with respect to a derivative atom, all other
    /// atoms independent; composite atoms differentiate through their
    /// explicit argument dependence.
    Expression partial(AtomId a) const;

    /// Highest k with the k-th derivative of v occurring in the normal form,
    /// or NEG_INF. Because the form is normalized this is the true HOD for
    /// the supported algebra.
    int hod(VarRef v) const;
    /// Highest derivative order of the named driving function, or NEG_INF.
    int hod_driving(const std::string& name) const;

    /// Replace every occurrence of atom `a` by `e` and renormalize.
    Expression substitute(AtomId a, const Expression& e) const;

    /// Simultaneous substitution: occurrences inside replacement expressions
    /// are not substituted again.
    Expression substitute_many(const std::map<AtomId, Expression>& subs) const;

    /// Normal-form reduction of numerator and denominator modulo `rel = 0`.
    Expression reduce_mod(const Expression& rel) const;

    Value evaluate(const ValuePoint& p) const;

    bool depends_on(AtomId a) const;
    void collect_atoms(std::vector<AtomId>& out) const;

    /// Canonical serialization: sorted monomials, lexicographic atom order.
    /// Equal expressions have equal serializations.
    std::string str(const std::function<std::string(VarRef)>& names) const;
    std::string str() const;  // index-based fallback names (x0, y1, ...)

    friend bool operator==(const Expression& a, const Expression& b);
    friend bool operator!=(const Expression& a, const Expression& b) { return !(a == b); }

private:
    struct Rep;
    std::shared_ptr<const Rep> rep_;
    explicit Expression(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
};

/// True iff the numerator normal form is the zero polynomial. Sound for
/// polynomial/rational identities over the atom algebra; identities hidden
/// behind transcendental atoms are out of scope by design.
bool is_identically_zero(const Expression& e);

/// Randomized identity self-check (Schwartz-Zippel style): samples the atoms
/// of a nonzero-form expression at `reps` rational points with numerator and
/// denominator bounded by 10^4. Returns false if every sample evaluates to
/// zero, which indicates a normalization bug. Zero-form expressions pass.
bool identity_selfcheck(const Expression& e, std::uint64_t seed, int reps = 5);

/// Equation equality up to overall sign (f = 0 and -f = 0 are the same
/// constraint).
bool same_equation(const Expression& a, const Expression& b);

/// Scale so the leading numerator coefficient is positive (for sign-blind
/// comparisons and display of kernel vectors).
Expression sign_normalized(const Expression& e);

} // namespace sigreg
