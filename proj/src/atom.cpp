#include "sigreg/atom.hpp"
#include "sigreg/expr.hpp"

#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace sigreg {

namespace {

struct Registry {
    std::mutex mu;
    std::deque<AtomData> atoms;
    std::deque<std::string> keys;
    std::unordered_map<std::string, AtomId> index;
};

Registry& reg() {
    static Registry r;
    return r;
}

std::string build_key(const AtomData& a) {
    std::ostringstream os;
    switch (a.kind) {
    case AtomKind::Time: os << "t"; break;
    case AtomKind::Param: os << "p:" << a.name; break;
    case AtomKind::Driving: os << "g:" << a.name << ":" << a.order; break;
    case AtomKind::State: os << "x:" << a.var << ":" << a.order; break;
    case AtomKind::Aux: os << "y:" << a.var << ":" << a.order; break;
    case AtomKind::Trans:
        os << "f:" << trans_op_name(a.op) << "(" << a.args[0].str() << ")";
        break;
    case AtomKind::FuncApp: {
        os << "F:" << a.name << ":[";
        for (size_t i = 0; i < a.dmulti.size(); ++i)
            os << (i ? "," : "") << a.dmulti[i];
        os << "](";
        for (size_t i = 0; i < a.args.size(); ++i)
            os << (i ? "," : "") << a.args[i].str();
        os << ")";
        break;
    }
    }
    return os.str();
}

AtomId intern(AtomData a) {
    std::string key = build_key(a);
    Registry& r = reg();
    std::lock_guard<std::mutex> lock(r.mu);
    auto it = r.index.find(key);
    if (it != r.index.end()) return it->second;
    AtomId id = static_cast<AtomId>(r.atoms.size());
    r.atoms.push_back(std::move(a));
    r.keys.push_back(std::move(key));
    r.index.emplace(r.keys.back(), id);
    return id;
}

// Rank used as the primary comparison key. Derivative atoms of state and
// auxiliary variables rank highest so that constraint polynomials are led by
// variable monomials, not parameters.
int kind_rank(AtomKind k) {
    switch (k) {
    case AtomKind::Time: return 0;
    case AtomKind::Param: return 1;
    case AtomKind::Driving: return 2;
    case AtomKind::FuncApp: return 3;
    case AtomKind::Trans: return 4;
    case AtomKind::State: return 5;
    case AtomKind::Aux: return 6;
    }
    return 7;
}

int cmp3(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int expr_cmp(const Expression& a, const Expression& b);

int atom_cmp_data(const AtomData& a, const AtomData& b) {
    if (int k = cmp3(kind_rank(a.kind), kind_rank(b.kind))) return k;
    switch (a.kind) {
    case AtomKind::Time: return 0;
    case AtomKind::Param: return a.name.compare(b.name);
    case AtomKind::Driving:
        if (int k = a.name.compare(b.name)) return k;
        return cmp3(a.order, b.order);
    case AtomKind::State:
    case AtomKind::Aux:
        if (int k = cmp3(a.var, b.var)) return k;
        return cmp3(a.order, b.order);
    case AtomKind::Trans:
        if (int k = cmp3(static_cast<int>(a.op), static_cast<int>(b.op))) return k;
        return expr_cmp(a.args[0], b.args[0]);
    case AtomKind::FuncApp: {
        if (int k = a.name.compare(b.name)) return k;
        if (int k = cmp3(a.dmulti.size(), b.dmulti.size())) return k;
        for (size_t i = 0; i < a.dmulti.size(); ++i)
            if (int k = cmp3(a.dmulti[i], b.dmulti[i])) return k;
        if (int k = cmp3(a.args.size(), b.args.size())) return k;
        for (size_t i = 0; i < a.args.size(); ++i)
            if (int k = expr_cmp(a.args[i], b.args[i])) return k;
        return 0;
    }
    }
    return 0;
}

int expr_cmp(const Expression& a, const Expression& b) {
    auto poly_cmp = [](const Poly& x, const Poly& y) -> int {
        const auto& xt = x.terms();
        const auto& yt = y.terms();
        size_t n = std::min(xt.size(), yt.size());
        for (size_t i = 0; i < n; ++i) {
            if (int k = mono_cmp(xt[i].m, yt[i].m)) return k;
            if (int k = cmp(xt[i].c, yt[i].c)) return k;
        }
        return cmp3(static_cast<long>(xt.size()), static_cast<long>(yt.size()));
    };
    if (int k = poly_cmp(a.num(), b.num())) return k;
    return poly_cmp(a.den(), b.den());
}

} // namespace

AtomId atom_time() {
    AtomData a;
    a.kind = AtomKind::Time;
    return intern(std::move(a));
}

AtomId atom_param(const std::string& name) {
    AtomData a;
    a.kind = AtomKind::Param;
    a.name = name;
    return intern(std::move(a));
}

AtomId atom_driving(const std::string& name, int order) {
    if (order < 0) throw Error("negative derivative order");
    AtomData a;
    a.kind = AtomKind::Driving;
    a.name = name;
    a.order = order;
    return intern(std::move(a));
}

AtomId atom_state(int var, int order) {
    if (order < 0) throw Error("negative derivative order");
    AtomData a;
    a.kind = AtomKind::State;
    a.var = var;
    a.order = order;
    return intern(std::move(a));
}

AtomId atom_aux(int var, int order) {
    if (order < 0) throw Error("negative derivative order");
    AtomData a;
    a.kind = AtomKind::Aux;
    a.var = var;
    a.order = order;
    return intern(std::move(a));
}

AtomId atom_var(VarRef v, int order) {
    return v.aux ? atom_aux(v.idx, order) : atom_state(v.idx, order);
}

AtomId atom_funcapp(const std::string& name, std::vector<int> dmulti,
                    std::vector<Expression> args) {
    AtomData a;
    a.kind = AtomKind::FuncApp;
    a.name = name;
    a.dmulti = std::move(dmulti);
    a.args = std::move(args);
    return intern(std::move(a));
}

AtomId atom_trans(TransOp op, const Expression& arg) {
    AtomData a;
    a.kind = AtomKind::Trans;
    a.op = op;
    a.args.push_back(arg);
    return intern(std::move(a));
}

const AtomData& atom(AtomId id) {
    Registry& r = reg();
    std::lock_guard<std::mutex> lock(r.mu);
    return r.atoms[id];
}

const std::string& atom_key(AtomId id) {
    Registry& r = reg();
    std::lock_guard<std::mutex> lock(r.mu);
    return r.keys[id];
}

int atom_cmp(AtomId a, AtomId b) {
    if (a == b) return 0;
    return atom_cmp_data(atom(a), atom(b));
}

AtomId atom_shift_order(AtomId id, int p) {
    const AtomData& a = atom(id);
    switch (a.kind) {
    case AtomKind::State: return atom_state(a.var, a.order + p);
    case AtomKind::Aux: return atom_aux(a.var, a.order + p);
    case AtomKind::Driving: return atom_driving(a.name, a.order + p);
    default: throw Error("atom_shift_order: not a derivative atom");
    }
}

const char* trans_op_name(TransOp op) {
    switch (op) {
    case TransOp::Sin: return "sin";
    case TransOp::Cos: return "cos";
    case TransOp::Exp: return "exp";
    case TransOp::Ln: return "ln";
    }
    return "?";
}

std::string atom_to_string(AtomId id,
                           const std::function<std::string(VarRef)>& names) {
    const AtomData& a = atom(id);
    std::ostringstream os;
    auto deriv = [&](const std::string& base, int order) {
        if (order == 0) return base;
        if (order <= 2) return base + std::string(order, '\'');
        return "der(" + base + "," + std::to_string(order) + ")";
    };
    switch (a.kind) {
    case AtomKind::Time: return "t";
    case AtomKind::Param: return a.name;
    case AtomKind::Driving: return deriv(a.name, a.order);
    case AtomKind::State: return deriv(names({false, a.var}), a.order);
    case AtomKind::Aux: return deriv(names({true, a.var}), a.order);
    case AtomKind::Trans:
        os << trans_op_name(a.op) << "(" << a.args[0].str(names) << ")";
        return os.str();
    case AtomKind::FuncApp: {
        bool plain = true;
        for (int d : a.dmulti) plain = plain && d == 0;
        if (plain) {
            os << a.name;
        } else {
            os << "D(" << a.name;
            for (size_t i = 0; i < a.dmulti.size(); ++i)
                for (int k = 0; k < a.dmulti[i]; ++k)
                    os << "," << (i + 1);
            os << ")";
        }
        os << "(";
        for (size_t i = 0; i < a.args.size(); ++i)
            os << (i ? "," : "") << a.args[i].str(names);
        os << ")";
        return os.str();
    }
    }
    return "?";
}

} // namespace sigreg
