#include "sigreg/poly.hpp"
#include "sigreg/expr.hpp"

#include <algorithm>
#include <map>

namespace sigreg {

int Monomial::degree() const {
    int d = 0;
    for (auto& [a, e] : f) d += e;
    return d;
}

int Monomial::exponent(AtomId a) const {
    for (auto& [b, e] : f)
        if (b == a) return e;
    return 0;
}

bool operator==(const Monomial& a, const Monomial& b) {
    return a.f == b.f;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
    if (a.f == b.f) return 0;
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db ? -1 : 1;
    // Scan from the highest atom down; first exponent difference decides.
    auto ia = a.f.rbegin(), ib = b.f.rbegin();
    while (ia != a.f.rend() && ib != b.f.rend()) {
        int k = atom_cmp(ia->first, ib->first);
        if (k > 0) return 1;   // a has a factor with a higher atom
        if (k < 0) return -1;
        if (ia->second != ib->second)
            return ia->second > ib->second ? 1 : -1;
        ++ia, ++ib;
    }
    if (ia != a.f.rend()) return 1;
    if (ib != b.f.rend()) return -1;
    return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f.reserve(a.f.size() + b.f.size());
    auto ia = a.f.begin(), ib = b.f.begin();
    while (ia != a.f.end() && ib != b.f.end()) {
        int k = atom_cmp(ia->first, ib->first);
        if (k < 0) r.f.push_back(*ia++);
        else if (k > 0) r.f.push_back(*ib++);
        else {
            r.f.emplace_back(ia->first, ia->second + ib->second);
            ++ia, ++ib;
        }
    }
    r.f.insert(r.f.end(), ia, a.f.end());
    r.f.insert(r.f.end(), ib, b.f.end());
    return r;
}

std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto ia = a.f.begin();
    for (auto& [atom_b, eb] : b.f) {
        while (ia != a.f.end() && atom_cmp(ia->first, atom_b) < 0)
            r.f.push_back(*ia++);
        if (ia == a.f.end() || ia->first != atom_b || ia->second < eb)
            return std::nullopt;
        if (ia->second > eb) r.f.emplace_back(ia->first, ia->second - eb);
        ++ia;
    }
    r.f.insert(r.f.end(), ia, a.f.end());
    return r;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto ia = a.f.begin(), ib = b.f.begin();
    while (ia != a.f.end() && ib != b.f.end()) {
        int k = atom_cmp(ia->first, ib->first);
        if (k < 0) ++ia;
        else if (k > 0) ++ib;
        else {
            r.f.emplace_back(ia->first, std::min(ia->second, ib->second));
            ++ia, ++ib;
        }
    }
    return r;
}

Poly::Poly(const mpq_class& c) {
    if (c != 0) t_.push_back({Monomial{}, c});
}

Poly Poly::atom(AtomId a, int exp) {
    Poly p;
    if (exp == 0) return Poly(mpq_class(1));
    Monomial m;
    m.f.emplace_back(a, exp);
    p.t_.push_back({std::move(m), mpq_class(1)});
    return p;
}

bool Poly::is_constant() const {
    return t_.empty() || (t_.size() == 1 && t_[0].m.is_one());
}

std::optional<mpq_class> Poly::as_constant() const {
    if (t_.empty()) return mpq_class(0);
    if (t_.size() == 1 && t_[0].m.is_one()) return t_[0].c;
    return std::nullopt;
}

int Poly::degree() const {
    int d = 0;
    for (auto& t : t_) d = std::max(d, t.m.degree());
    return d;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        return mono_cmp(a.m, b.m) > 0;
    });
    Poly p;
    for (auto& t : terms) {
        if (t.c == 0) continue;
        if (!p.t_.empty() && p.t_.back().m == t.m) {
            p.t_.back().c += t.c;
            if (p.t_.back().c == 0) p.t_.pop_back();
        } else {
            p.t_.push_back(std::move(t));
        }
    }
    return p;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.t_) t.c = -t.c;
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.t_.reserve(t_.size() + o.t_.size());
    auto ia = t_.begin(), ib = o.t_.begin();
    while (ia != t_.end() && ib != o.t_.end()) {
        int k = mono_cmp(ia->m, ib->m);
        if (k > 0) r.t_.push_back(*ia++);
        else if (k < 0) r.t_.push_back(*ib++);
        else {
            mpq_class c = ia->c + ib->c;
            if (c != 0) r.t_.push_back({ia->m, std::move(c)});
            ++ia, ++ib;
        }
    }
    r.t_.insert(r.t_.end(), ia, t_.end());
    r.t_.insert(r.t_.end(), ib, o.t_.end());
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::mul_term(const Monomial& m, const mpq_class& c) const {
    if (c == 0) return Poly();
    Poly r;
    r.t_.reserve(t_.size());
    for (auto& t : t_) r.t_.push_back({mono_mul(t.m, m), t.c * c});
    // multiplying by a fixed monomial preserves the term order
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    Poly acc;
    for (auto& t : o.t_) acc = acc + mul_term(t.m, t.c);
    return acc;
}

Poly Poly::pow(int e) const {
    if (e < 0) throw Error("Poly::pow: negative exponent");
    Poly r(mpq_class(1));
    Poly base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

std::optional<Poly> Poly::divide(const Poly& d) const {
    if (d.is_zero()) return std::nullopt;
    if (is_zero()) return Poly();
    if (auto c = d.as_constant()) {
        Poly q = *this;
        for (auto& t : q.t_) t.c /= *c;
        return q;
    }
    Poly rem = *this;
    std::vector<Term> qt;
    while (!rem.is_zero()) {
        auto m = mono_div(rem.lead().m, d.lead().m);
        if (!m) return std::nullopt;
        mpq_class c = rem.lead().c / d.lead().c;
        qt.push_back({*m, c});
        rem = rem - d.mul_term(*m, c);
    }
    return Poly::from_terms(std::move(qt));
}

Poly Poly::reduce_mod(const Poly& d) const {
    if (d.is_zero()) return *this;
    Poly rem = *this;
    Poly out;
    // Reduce any term divisible by lead(d); move irreducible leads to out.
    int guard = 0;
    while (!rem.is_zero() && guard++ < 100000) {
        auto m = mono_div(rem.lead().m, d.lead().m);
        if (m) {
            mpq_class c = rem.lead().c / d.lead().c;
            rem = rem - d.mul_term(*m, c);
        } else {
            out = out + Poly::from_terms({rem.lead()});
            rem = rem - Poly::from_terms({rem.lead()});
        }
    }
    return out + rem;
}

mpq_class Poly::content() const {
    if (is_zero()) return 0;
    mpz_class num_gcd = 0, den_lcm = 1;
    for (auto& t : t_) {
        mpz_class n = abs(t.c.get_num());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.c.get_den().get_mpz_t());
    }
    mpq_class c(num_gcd, den_lcm);
    c.canonicalize();
    if (lead().c < 0) c = -c;
    return c;
}

Monomial Poly::monomial_content() const {
    if (is_zero()) return Monomial{};
    Monomial g = t_[0].m;
    for (size_t i = 1; i < t_.size() && !g.is_one(); ++i)
        g = mono_gcd(g, t_[i].m);
    return g;
}

Poly Poly::scaled(const mpq_class& c) const {
    if (c == 0) return Poly();
    Poly p = *this;
    for (auto& t : p.t_) t.c *= c;
    return p;
}

Poly Poly::div_monomial(const Monomial& m) const {
    Poly p;
    p.t_.reserve(t_.size());
    for (auto& t : t_) {
        auto d = mono_div(t.m, m);
        if (!d) throw Error("div_monomial: not divisible");
        p.t_.push_back({*d, t.c});
    }
    return p;
}

void Poly::collect_atoms(std::vector<AtomId>& out) const {
    for (auto& t : t_)
        for (auto& [a, e] : t.m.f) out.push_back(a);
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (size_t i = 0; i < a.t_.size(); ++i)
        if (a.t_[i].c != b.t_[i].c || !(a.t_[i].m == b.t_[i].m)) return false;
    return true;
}

} // namespace sigreg
