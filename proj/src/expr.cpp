#include "sigreg/expr.hpp"
#include "sigreg/point.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace sigreg {

struct Expression::Rep {
    Poly num;
    Poly den;  // primitive, positive leading coefficient, never zero
};

namespace {

const Poly& one_poly() {
    static const Poly p{mpq_class(1)};
    return p;
}

std::shared_ptr<const Expression::Rep> make_rep(Poly num, Poly den) {
    return std::make_shared<const Expression::Rep>(Expression::Rep{std::move(num), std::move(den)});
}

} // namespace

Expression::Expression() : rep_(make_rep(Poly(), one_poly())) {}

Expression::Expression(const mpq_class& c) : rep_(make_rep(Poly(c), one_poly())) {}

Expression::Expression(long c) : rep_(make_rep(Poly(mpq_class(c)), one_poly())) {}

const Poly& Expression::num() const { return rep_->num; }
const Poly& Expression::den() const { return rep_->den; }

bool Expression::is_polynomial() const {
    auto c = rep_->den.as_constant();
    return c.has_value();
}

std::optional<mpq_class> Expression::as_constant() const {
    auto n = num().as_constant();
    auto d = den().as_constant();
    if (n && d) return *n / *d;
    return std::nullopt;
}

Expression Expression::atom(AtomId a) {
    return make(Poly::atom(a), one_poly());
}

Expression Expression::var(VarRef v, int order) {
    return atom(atom_var(v, order));
}

Expression Expression::time() { return atom(atom_time()); }

Expression Expression::param(const std::string& name) {
    return atom(atom_param(name));
}

// Canonical reduced form: cancel the common monomial factor, make den a
// primitive integer polynomial with positive leading coefficient, and attempt
// heuristic full cancellation (num/den or den/num exact division).
Expression Expression::make(Poly num, Poly den) {
    if (den.is_zero()) throw Error("division by an identically zero expression");
    if (num.is_zero()) return Expression();

    Monomial mg = mono_gcd(num.monomial_content(), den.monomial_content());
    if (!mg.is_one()) {
        num = num.div_monomial(mg);
        den = den.div_monomial(mg);
    }

    if (!den.is_constant()) {
        if (auto q = num.divide(den)) {
            num = std::move(*q);
            den = one_poly();
        } else if (auto q2 = den.divide(num)) {
            // p / (p*r) = 1/r
            den = std::move(*q2);
            num = Poly(mpq_class(1));
        }
    }

    mpq_class c = den.content();
    if (c != 1) {
        den = den.scaled(mpq_class(1) / c);
        num = num.scaled(mpq_class(1) / c);
    }
    return Expression(make_rep(std::move(num), std::move(den)));
}

Expression Expression::operator-() const {
    return Expression(make_rep(-num(), den()));
}

Expression Expression::operator+(const Expression& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (den() == o.den()) return make(num() + o.num(), den());
    return make(num() * o.den() + o.num() * den(), den() * o.den());
}

Expression Expression::operator-(const Expression& o) const {
    return *this + (-o);
}

namespace {

// Cancel common factors across a numerator/denominator pair before
// multiplying, via exact-division trials.
void pre_cancel(Poly& a, Poly& b) {
    if (a.is_constant() || b.is_constant()) return;
    if (auto q = a.divide(b)) {
        a = std::move(*q);
        b = Poly(mpq_class(1));
    } else if (auto q2 = b.divide(a)) {
        b = std::move(*q2);
        a = Poly(mpq_class(1));
    }
}

} // namespace

Expression Expression::operator*(const Expression& o) const {
    if (is_zero() || o.is_zero()) return Expression();
    Poly n1 = num(), d1 = den(), n2 = o.num(), d2 = o.den();
    pre_cancel(n1, d2);
    pre_cancel(n2, d1);
    return make(n1 * n2, d1 * d2);
}

Expression Expression::operator/(const Expression& o) const {
    if (o.is_zero()) throw Error("division by an identically zero expression");
    if (is_zero()) return Expression();
    Poly n1 = num(), d1 = den(), n2 = o.den(), d2 = o.num();
    pre_cancel(n1, d2);
    pre_cancel(n2, d1);
    return make(n1 * n2, d1 * d2);
}

Expression Expression::pow(int e) const {
    if (e == 0) return Expression(1L);
    if (e < 0) return Expression(1L) / pow(-e);
    return make(num().pow(e), den().pow(e));
}

namespace {

// d(atom)/dt as an Expression.
Expression atom_total_derivative(AtomId id) {
    const AtomData& a = atom(id);
    switch (a.kind) {
    case AtomKind::Time: return Expression(1L);
    case AtomKind::Param: return Expression();
    case AtomKind::State:
    case AtomKind::Aux:
    case AtomKind::Driving:
        return Expression::atom(atom_shift_order(id, 1));
    case AtomKind::FuncApp: {
        Expression sum;
        for (size_t i = 0; i < a.args.size(); ++i) {
            std::vector<int> dm = a.dmulti;
            dm[i] += 1;
            Expression di = Expression::atom(atom_funcapp(a.name, std::move(dm), a.args));
            sum = sum + di * a.args[i].total_derivative(1);
        }
        return sum;
    }
    case AtomKind::Trans: {
        Expression gp = a.args[0].total_derivative(1);
        switch (a.op) {
        case TransOp::Sin:
            return Expression::atom(atom_trans(TransOp::Cos, a.args[0])) * gp;
        case TransOp::Cos:
            return -Expression::atom(atom_trans(TransOp::Sin, a.args[0])) * gp;
        case TransOp::Exp:
            return Expression::atom(id) * gp;
        case TransOp::Ln:
            return gp / a.args[0];
        }
        break;
    }
    }
    throw Error("atom_total_derivative: unreachable");
}

// d(atom)/dv for a derivative atom v (chain rule through composite atoms).
Expression atom_partial(AtomId id, AtomId v) {
    if (id == v) return Expression(1L);
    const AtomData& a = atom(id);
    switch (a.kind) {
    case AtomKind::FuncApp: {
        Expression sum;
        for (size_t i = 0; i < a.args.size(); ++i) {
            if (!a.args[i].depends_on(v)) continue;
            std::vector<int> dm = a.dmulti;
            dm[i] += 1;
            Expression di = Expression::atom(atom_funcapp(a.name, std::move(dm), a.args));
            sum = sum + di * a.args[i].partial(v);
        }
        return sum;
    }
    case AtomKind::Trans: {
        if (!a.args[0].depends_on(v)) return Expression();
        Expression gp = a.args[0].partial(v);
        switch (a.op) {
        case TransOp::Sin:
            return Expression::atom(atom_trans(TransOp::Cos, a.args[0])) * gp;
        case TransOp::Cos:
            return -Expression::atom(atom_trans(TransOp::Sin, a.args[0])) * gp;
        case TransOp::Exp:
            return Expression::atom(id) * gp;
        case TransOp::Ln:
            return gp / a.args[0];
        }
        break;
    }
    default:
        return Expression();
    }
    return Expression();
}

Expression poly_derivative(const Poly& p,
                           const std::function<Expression(AtomId)>& datom) {
    Expression acc;
    for (const Term& t : p.terms()) {
        for (size_t i = 0; i < t.m.f.size(); ++i) {
            auto [a, e] = t.m.f[i];
            Expression da = datom(a);
            if (da.is_zero()) continue;
            // coefficient * e * (monomial with a's exponent reduced) * da
            Monomial rest;
            rest.f = t.m.f;
            if (e == 1) rest.f.erase(rest.f.begin() + i);
            else rest.f[i].second -= 1;
            Poly part;
            part = Poly::from_terms({Term{rest, t.c * e}});
            acc = acc + Expression::make(part, Poly(mpq_class(1))) * da;
        }
    }
    return acc;
}

} // namespace

Expression Expression::total_derivative(int p) const {
    if (p < 0) throw Error("total_derivative: negative order");
    Expression e = *this;
    for (int k = 0; k < p; ++k) {
        const Poly& n = e.num();
        const Poly& d = e.den();
        Expression dn = poly_derivative(n, atom_total_derivative);
        if (d.is_constant()) {
            e = dn / Expression::make(d, Poly(mpq_class(1)));
        } else {
            Expression dd = poly_derivative(d, atom_total_derivative);
            Expression en = Expression::make(n, Poly(mpq_class(1)));
            Expression ed = Expression::make(d, Poly(mpq_class(1)));
            e = (dn * ed - en * dd) / (ed * ed);
        }
    }
    return e;
}

Expression Expression::partial(AtomId a) const {
    const AtomData& ad = atom(a);
    if (ad.kind != AtomKind::State && ad.kind != AtomKind::Aux)
        throw Error("partial: not a state or auxiliary derivative atom");
    auto datom = [a](AtomId id) { return atom_partial(id, a); };
    const Poly& n = num();
    const Poly& d = den();
    Expression dn = poly_derivative(n, datom);
    if (d.is_constant())
        return dn / Expression::make(d, Poly(mpq_class(1)));
    Expression dd = poly_derivative(d, datom);
    Expression en = Expression::make(n, Poly(mpq_class(1)));
    Expression ed = Expression::make(d, Poly(mpq_class(1)));
    return (dn * ed - en * dd) / (ed * ed);
}

namespace {

int atom_hod(AtomId id, VarRef v) {
    const AtomData& a = atom(id);
    switch (a.kind) {
    case AtomKind::State:
        return (!v.aux && a.var == v.idx) ? a.order : NEG_INF;
    case AtomKind::Aux:
        return (v.aux && a.var == v.idx) ? a.order : NEG_INF;
    case AtomKind::FuncApp: {
        int h = NEG_INF;
        for (auto& arg : a.args) h = std::max(h, arg.hod(v));
        return h;
    }
    case AtomKind::Trans:
        return a.args[0].hod(v);
    default:
        return NEG_INF;
    }
}

int poly_hod(const Poly& p, VarRef v) {
    int h = NEG_INF;
    std::vector<AtomId> atoms;
    p.collect_atoms(atoms);
    for (AtomId a : atoms) h = std::max(h, atom_hod(a, v));
    return h;
}

int atom_hod_driving(AtomId id, const std::string& name) {
    const AtomData& a = atom(id);
    switch (a.kind) {
    case AtomKind::Driving:
        return a.name == name ? a.order : NEG_INF;
    case AtomKind::FuncApp: {
        int h = NEG_INF;
        for (auto& arg : a.args) h = std::max(h, arg.hod_driving(name));
        return h;
    }
    case AtomKind::Trans:
        return a.args[0].hod_driving(name);
    default:
        return NEG_INF;
    }
}

} // namespace

int Expression::hod(VarRef v) const {
    return std::max(poly_hod(num(), v), poly_hod(den(), v));
}

int Expression::hod_driving(const std::string& name) const {
    int h = NEG_INF;
    std::vector<AtomId> atoms;
    num().collect_atoms(atoms);
    den().collect_atoms(atoms);
    for (AtomId a : atoms) h = std::max(h, atom_hod_driving(a, name));
    return h;
}

bool Expression::depends_on(AtomId a) const {
    std::vector<AtomId> atoms_here;
    collect_atoms(atoms_here);
    for (AtomId id : atoms_here) {
        if (id == a) return true;
        const AtomData& d = atom(id);
        if (d.kind == AtomKind::FuncApp || d.kind == AtomKind::Trans)
            for (auto& arg : d.args)
                if (arg.depends_on(a)) return true;
    }
    return false;
}

void Expression::collect_atoms(std::vector<AtomId>& out) const {
    num().collect_atoms(out);
    den().collect_atoms(out);
}

namespace {

AtomId substitute_in_atom(AtomId id, AtomId target, const Expression& e, bool& changed);

Expression substitute_poly(const Poly& p, AtomId target, const Expression& e) {
    Expression acc;
    for (const Term& t : p.terms()) {
        Expression prod(t.c);
        for (auto& [a, exp] : t.m.f) {
            Expression factor;
            if (a == target) {
                factor = e;
            } else {
                bool changed = false;
                AtomId b = substitute_in_atom(a, target, e, changed);
                factor = Expression::atom(b);
            }
            prod = prod * factor.pow(exp);
        }
        acc = acc + prod;
    }
    return acc;
}

AtomId substitute_in_atom(AtomId id, AtomId target, const Expression& e, bool& changed) {
    const AtomData& a = atom(id);
    if (a.kind != AtomKind::FuncApp && a.kind != AtomKind::Trans) return id;
    std::vector<Expression> new_args;
    bool any = false;
    for (auto& arg : a.args) {
        if (arg.depends_on(target)) {
            new_args.push_back(arg.substitute(target, e));
            any = true;
        } else {
            new_args.push_back(arg);
        }
    }
    if (!any) return id;
    changed = true;
    if (a.kind == AtomKind::Trans) return atom_trans(a.op, new_args[0]);
    return atom_funcapp(a.name, a.dmulti, std::move(new_args));
}

} // namespace

Expression Expression::substitute(AtomId a, const Expression& e) const {
    if (!depends_on(a)) return *this;
    Expression n = substitute_poly(num(), a, e);
    Expression d = substitute_poly(den(), a, e);
    return n / d;
}

namespace {

AtomId substitute_many_in_atom(AtomId id, const std::map<AtomId, Expression>& subs);

Expression substitute_many_poly(const Poly& p, const std::map<AtomId, Expression>& subs) {
    Expression acc;
    for (const Term& t : p.terms()) {
        Expression prod(t.c);
        for (auto& [a, exp] : t.m.f) {
            auto hit = subs.find(a);
            Expression factor = hit != subs.end()
                                    ? hit->second
                                    : Expression::atom(substitute_many_in_atom(a, subs));
            prod = prod * factor.pow(exp);
        }
        acc = acc + prod;
    }
    return acc;
}

AtomId substitute_many_in_atom(AtomId id, const std::map<AtomId, Expression>& subs) {
    const AtomData& a = atom(id);
    if (a.kind != AtomKind::FuncApp && a.kind != AtomKind::Trans) return id;
    bool any = false;
    for (auto& arg : a.args)
        for (auto& [target, repl] : subs)
            if (arg.depends_on(target)) any = true;
    if (!any) return id;
    std::vector<Expression> new_args;
    for (auto& arg : a.args) new_args.push_back(arg.substitute_many(subs));
    if (a.kind == AtomKind::Trans) return atom_trans(a.op, new_args[0]);
    return atom_funcapp(a.name, a.dmulti, std::move(new_args));
}

} // namespace

Expression Expression::substitute_many(const std::map<AtomId, Expression>& subs) const {
    if (subs.empty()) return *this;
    Expression n = substitute_many_poly(num(), subs);
    Expression d = substitute_many_poly(den(), subs);
    return n / d;
}

Expression Expression::reduce_mod(const Expression& rel) const {
    if (!rel.is_polynomial())
        throw Error("reduce_mod: relation must be polynomial");
    const Poly& r = rel.num();
    if (r.is_zero()) return *this;
    Poly n = num().reduce_mod(r);
    Poly d = den().reduce_mod(r);
    return make(std::move(n), std::move(d));
}

namespace {

Value value_add(const Value& a, const Value& b) {
    if (a.exact && b.exact) return Value::rat(a.q + b.q);
    return Value::flt(a.as_double() + b.as_double());
}
Value value_mul(const Value& a, const Value& b) {
    if (a.exact && b.exact) return Value::rat(a.q * b.q);
    return Value::flt(a.as_double() * b.as_double());
}
Value value_pow(const Value& a, int e) {
    if (a.exact) {
        mpq_class r(1);
        mpq_class base = a.q;
        int n = e;
        for (; n > 0; --n) r *= base;
        return Value::rat(r);
    }
    return Value::flt(std::pow(a.as_double(), e));
}

Value eval_atom(AtomId id, const ValuePoint& p) {
    const AtomData& a = atom(id);
    auto require = [&](std::optional<Value> v, const std::string& what) {
        if (!v) throw Error("evaluate: missing binding for " + what);
        return *v;
    };
    switch (a.kind) {
    case AtomKind::Time:
        return require(p.time(), "t");
    case AtomKind::Param:
        return require(p.param(a.name), a.name);
    case AtomKind::Driving:
        return require(p.driving(a.name, a.order),
                       a.name + "^(" + std::to_string(a.order) + ")");
    case AtomKind::State:
        return require(p.var({false, a.var}, a.order), atom_key(id));
    case AtomKind::Aux:
        return require(p.var({true, a.var}, a.order), atom_key(id));
    case AtomKind::FuncApp:
        return require(p.func_stub(a.name, a.dmulti), "stub for " + atom_key(id));
    case AtomKind::Trans: {
        Value g = a.args[0].evaluate(p);
        double x = g.as_double();
        switch (a.op) {
        case TransOp::Sin: return Value::flt(std::sin(x));
        case TransOp::Cos: return Value::flt(std::cos(x));
        case TransOp::Exp: return Value::flt(std::exp(x));
        case TransOp::Ln:
            if (x <= 0) throw Error("evaluate: ln of nonpositive value");
            return Value::flt(std::log(x));
        }
    }
    }
    throw Error("eval_atom: unreachable");
}

Value eval_poly(const Poly& p, const ValuePoint& pt) {
    Value acc = Value::rat(0);
    for (const Term& t : p.terms()) {
        Value term = Value::rat(t.c);
        for (auto& [a, e] : t.m.f)
            term = value_mul(term, value_pow(eval_atom(a, pt), e));
        acc = value_add(acc, term);
    }
    return acc;
}

} // namespace

Value Expression::evaluate(const ValuePoint& p) const {
    Value n = eval_poly(num(), p);
    Value d = eval_poly(den(), p);
    if (d.exact ? d.q == 0 : d.d == 0.0)
        throw Error("evaluate: denominator is zero at the value point");
    if (n.exact && d.exact) return Value::rat(n.q / d.q);
    return Value::flt(n.as_double() / d.as_double());
}

namespace {

std::string poly_str(const Poly& p, const std::function<std::string(VarRef)>& names) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const Term& t : p.terms()) {
        mpq_class c = t.c;
        if (first) {
            if (c < 0) { os << "-"; c = -c; }
        } else {
            os << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        first = false;
        bool coeff_one = (c == 1) && !t.m.is_one();
        if (!coeff_one) os << c.get_str();
        bool need_star = !coeff_one;
        for (auto& [a, e] : t.m.f) {
            if (need_star) os << "*";
            os << atom_to_string(a, names);
            if (e > 1) os << "^" << e;
            need_star = true;
        }
    }
    return os.str();
}

std::string default_name(VarRef v) {
    return (v.aux ? "y" : "x") + std::to_string(v.idx);
}

} // namespace

std::string Expression::str(const std::function<std::string(VarRef)>& names) const {
    if (den().as_constant() == mpq_class(1)) return poly_str(num(), names);
    return "(" + poly_str(num(), names) + ")/(" + poly_str(den(), names) + ")";
}

std::string Expression::str() const { return str(default_name); }

bool operator==(const Expression& a, const Expression& b) {
    return a.num() == b.num() && a.den() == b.den();
}

bool is_identically_zero(const Expression& e) {
    return e.num().is_zero();
}

bool identity_selfcheck(const Expression& e, std::uint64_t seed, int reps) {
    if (e.num().is_zero()) return true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num_dist(-10000, 10000);
    std::uniform_int_distribution<long> den_dist(1, 10000);
    // Bind every atom (composite atoms included, as opaque symbols).
    std::vector<AtomId> atoms;
    e.collect_atoms(atoms);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    for (int r = 0; r < reps; ++r) {
        // Direct polynomial sampling over atom values.
        std::map<AtomId, mpq_class> vals;
        for (AtomId a : atoms) vals[a] = mpq_class(num_dist(rng), den_dist(rng));
        mpq_class acc = 0;
        for (const Term& t : e.num().terms()) {
            mpq_class term = t.c;
            for (auto& [a, exp] : t.m.f) {
                mpq_class base = vals[a];
                for (int k = 0; k < exp; ++k) term *= base;
            }
            acc += term;
        }
        if (acc != 0) return true;
    }
    return false;
}

bool same_equation(const Expression& a, const Expression& b) {
    if (is_identically_zero(a - b)) return true;
    return is_identically_zero(a + b);
}

Expression sign_normalized(const Expression& e) {
    if (e.num().is_zero()) return e;
    if (e.num().lead().c < 0) return -e;
    return e;
}

} // namespace sigreg
