#include "sigreg/parse.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace sigreg {

namespace {

struct Token {
    enum class Kind { Ident, Number, Sym, Prime, End };
    Kind kind = Kind::End;
    std::string text;
    mpq_class value;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : s_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    bool is_sym(const char* s) const {
        return tok_.kind == Token::Kind::Sym && tok_.text == s;
    }
    bool is_ident(const char* s) const {
        return tok_.kind == Token::Kind::Ident && tok_.text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }
    Token expect_sym(const char* s) {
        if (!is_sym(s)) fail(std::string("expected '") + s + "'");
        return next();
    }
    Token expect_ident() {
        if (tok_.kind != Token::Kind::Ident) fail("expected identifier");
        return next();
    }

private:
    void advance() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++pos_, ++line_, col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_, ++col_;
            } else {
                break;
            }
        }
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                take();
            tok_.kind = Token::Kind::Ident;
            tok_.text = s_.substr(start, pos_ - start);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && pos_ + 1 < s_.size() &&
                    std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            lex_number();
        } else if (c == '\'') {
            take();
            tok_.kind = Token::Kind::Prime;
            tok_.text = "'";
        } else {
            take();
            tok_.kind = Token::Kind::Sym;
            tok_.text = std::string(1, c);
        }
    }

    void lex_number() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
        std::string int_part = s_.substr(start, pos_ - start);
        std::string frac_part;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            take();
            size_t f = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
            frac_part = s_.substr(f, pos_ - f);
        }
        long exp10 = 0;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t save = pos_;
            int saved_col = col_;
            take();
            long sign = 1;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                if (s_[pos_] == '-') sign = -1;
                take();
            }
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                size_t e = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) take();
                exp10 = sign * std::stol(s_.substr(e, pos_ - e));
            } else {
                pos_ = save;  // bare 'e' belongs to the next token
                col_ = saved_col;
            }
        }
        mpz_class mant(int_part.empty() ? "0" : int_part);
        for (char d : frac_part) {
            mant *= 10;
            mant += d - '0';
        }
        long shift = exp10 - static_cast<long>(frac_part.size());
        mpq_class v(mant);
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(shift)));
        if (shift >= 0) v *= mpq_class(p10);
        else v /= mpq_class(p10);
        v.canonicalize();
        tok_.kind = Token::Kind::Number;
        tok_.value = v;
    }

    void take() { ++pos_, ++col_; }

    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

RawPtr mk(RawNode n) { return std::make_shared<RawNode>(std::move(n)); }

RawPtr raw_num(const mpq_class& v) {
    RawNode n;
    n.kind = RawNode::Kind::Number;
    n.value = v;
    return mk(std::move(n));
}

std::optional<TransOp> trans_of(const std::string& s) {
    if (s == "sin") return TransOp::Sin;
    if (s == "cos") return TransOp::Cos;
    if (s == "exp") return TransOp::Exp;
    if (s == "ln") return TransOp::Ln;
    return std::nullopt;
}

// Recursive-descent expression parser producing the raw tree. Declared
// symbols of the enclosing system drive identifier resolution.
class ExprParser {
public:
    ExprParser(Lexer& lx, const DaeSystem& sys) : lx_(lx), sys_(sys) {}

    RawPtr parse() { return parse_sum(); }

private:
    RawPtr parse_sum() {
        RawPtr lhs = parse_product();
        while (lx_.is_sym("+") || lx_.is_sym("-")) {
            bool add = lx_.is_sym("+");
            lx_.next();
            RawPtr rhs = parse_product();
            RawNode n;
            n.kind = add ? RawNode::Kind::Add : RawNode::Kind::Sub;
            n.kids = {lhs, rhs};
            lhs = mk(std::move(n));
        }
        return lhs;
    }

    RawPtr parse_product() {
        RawPtr lhs = parse_power();
        while (lx_.is_sym("*") || lx_.is_sym("/")) {
            bool mul = lx_.is_sym("*");
            lx_.next();
            RawPtr rhs = parse_power();
            RawNode n;
            n.kind = mul ? RawNode::Kind::Mul : RawNode::Kind::Div;
            n.kids = {lhs, rhs};
            lhs = mk(std::move(n));
        }
        return lhs;
    }

    RawPtr parse_power() {
        RawPtr base = parse_unary();
        if (lx_.is_sym("^")) {
            lx_.next();
            int sign = 1;
            if (lx_.is_sym("-")) {
                lx_.next();
                sign = -1;
            }
            if (lx_.peek().kind != Token::Kind::Number)
                lx_.fail("expected integer exponent");
            Token t = lx_.next();
            if (t.value.get_den() != 1) lx_.fail("exponent must be an integer");
            RawNode n;
            n.kind = RawNode::Kind::Pow;
            n.order = sign * static_cast<int>(t.value.get_num().get_si());
            n.kids = {base};
            return mk(std::move(n));
        }
        return base;
    }

    RawPtr parse_unary() {
        if (lx_.is_sym("-")) {
            lx_.next();
            RawNode n;
            n.kind = RawNode::Kind::Neg;
            n.kids = {parse_unary()};
            return mk(std::move(n));
        }
        if (lx_.is_sym("+")) {
            lx_.next();
            return parse_unary();
        }
        return parse_postfix(parse_primary());
    }

    RawPtr parse_postfix(RawPtr e) {
        while (lx_.peek().kind == Token::Kind::Prime) {
            Token t = lx_.next();
            if (e->kind == RawNode::Kind::Var) {
                RawNode n = *e;
                n.order += 1;
                e = mk(std::move(n));
            } else if (e->kind == RawNode::Kind::Driving) {
                RawNode n = *e;
                n.order += 1;
                e = mk(std::move(n));
            } else {
                throw ParseError("prime applies to variables and driving functions",
                                 t.line, t.col);
            }
        }
        return e;
    }

    std::vector<RawPtr> parse_args() {
        std::vector<RawPtr> args;
        lx_.expect_sym("(");
        if (!lx_.is_sym(")")) {
            args.push_back(parse_sum());
            while (lx_.is_sym(",")) {
                lx_.next();
                args.push_back(parse_sum());
            }
        }
        lx_.expect_sym(")");
        return args;
    }

    int expect_int() {
        if (lx_.peek().kind != Token::Kind::Number) lx_.fail("expected integer");
        Token t = lx_.next();
        if (t.value.get_den() != 1) lx_.fail("expected integer");
        return static_cast<int>(t.value.get_num().get_si());
    }

    const FuncDecl* find_func(const std::string& name) {
        for (auto& f : sys_.funcs)
            if (f.name == name) return &f;
        return nullptr;
    }

    RawPtr parse_primary() {
        Token t = lx_.peek();
        if (t.kind == Token::Kind::Number) {
            lx_.next();
            return raw_num(t.value);
        }
        if (lx_.is_sym("(")) {
            lx_.next();
            RawPtr e = parse_sum();
            lx_.expect_sym(")");
            return e;
        }
        if (t.kind != Token::Kind::Ident) lx_.fail("expected expression");
        lx_.next();
        const std::string& id = t.text;

        if (id == "t") {
            RawNode n;
            n.kind = RawNode::Kind::Time;
            return mk(std::move(n));
        }
        if (auto op = trans_of(id)) {
            auto args = parse_args();
            if (args.size() != 1)
                throw ParseError(id + " takes one argument", t.line, t.col);
            RawNode n;
            n.kind = RawNode::Kind::Trans;
            n.op = *op;
            n.kids = {args[0]};
            return mk(std::move(n));
        }
        if (id == "der") {
            lx_.expect_sym("(");
            RawPtr e = parse_sum();
            int k = 1;
            if (lx_.is_sym(",")) {
                lx_.next();
                k = expect_int();
                if (k < 0) throw ParseError("derivative order must be >= 0", t.line, t.col);
            }
            lx_.expect_sym(")");
            RawNode n;
            n.kind = RawNode::Kind::Der;
            n.order = k;
            n.kids = {e};
            return mk(std::move(n));
        }
        if (id == "D") {
            lx_.expect_sym("(");
            Token fn = lx_.expect_ident();
            const FuncDecl* f = find_func(fn.text);
            if (!f)
                throw ParseError("undeclared function '" + fn.text + "'", fn.line, fn.col);
            std::vector<int> dmulti(f->arity, 0);
            lx_.expect_sym(",");
            do {
                int i = expect_int();
                if (i < 1 || i > f->arity)
                    throw ParseError("partial index out of range for '" + fn.text + "'",
                                     fn.line, fn.col);
                dmulti[i - 1] += 1;
            } while (lx_.is_sym(",") && (lx_.next(), true));
            lx_.expect_sym(")");
            auto args = parse_args();
            if (static_cast<int>(args.size()) != f->arity)
                throw ParseError("arity mismatch for '" + fn.text + "'", fn.line, fn.col);
            RawNode n;
            n.kind = RawNode::Kind::Call;
            n.name = fn.text;
            n.dmulti = std::move(dmulti);
            n.kids = std::move(args);
            return mk(std::move(n));
        }
        if (const FuncDecl* f = find_func(id)) {
            auto args = parse_args();
            if (static_cast<int>(args.size()) != f->arity)
                throw ParseError("arity mismatch for '" + id + "'", t.line, t.col);
            RawNode n;
            n.kind = RawNode::Kind::Call;
            n.name = id;
            n.dmulti.assign(f->arity, 0);
            n.kids = std::move(args);
            return mk(std::move(n));
        }
        if (auto v = sys_.find_var(id)) {
            RawNode n;
            n.kind = RawNode::Kind::Var;
            n.var = *v;
            return mk(std::move(n));
        }
        for (auto& in : sys_.inputs) {
            if (in == id) {
                // optional (t) sugar, as the paper writes b(t)
                if (lx_.is_sym("(")) {
                    lx_.next();
                    if (!lx_.is_ident("t")) lx_.fail("driving functions take only t");
                    lx_.next();
                    lx_.expect_sym(")");
                }
                RawNode n;
                n.kind = RawNode::Kind::Driving;
                n.name = id;
                return mk(std::move(n));
            }
        }
        for (auto& c : sys_.consts) {
            if (c.name == id) {
                RawNode n;
                n.kind = RawNode::Kind::Param;
                n.name = id;
                return mk(std::move(n));
            }
        }
        throw ParseError("undeclared identifier '" + id + "'", t.line, t.col);
    }

    Lexer& lx_;
    const DaeSystem& sys_;
};

Expression normalize_raw(const RawNode& n, const DaeSystem& sys) {
    using K = RawNode::Kind;
    switch (n.kind) {
    case K::Number: return Expression(n.value);
    case K::Time: return Expression::time();
    case K::Var: return Expression::var(n.var, n.order);
    case K::Param: return Expression::param(n.name);
    case K::Driving: return Expression::atom(atom_driving(n.name, n.order));
    case K::Call: {
        std::vector<Expression> args;
        args.reserve(n.kids.size());
        for (auto& k : n.kids) args.push_back(normalize_raw(*k, sys));
        return Expression::atom(atom_funcapp(n.name, n.dmulti, std::move(args)));
    }
    case K::Trans:
        return Expression::atom(atom_trans(n.op, normalize_raw(*n.kids[0], sys)));
    case K::Der:
        return normalize_raw(*n.kids[0], sys).total_derivative(n.order);
    case K::Add:
        return normalize_raw(*n.kids[0], sys) + normalize_raw(*n.kids[1], sys);
    case K::Sub:
        return normalize_raw(*n.kids[0], sys) - normalize_raw(*n.kids[1], sys);
    case K::Mul:
        return normalize_raw(*n.kids[0], sys) * normalize_raw(*n.kids[1], sys);
    case K::Div:
        return normalize_raw(*n.kids[0], sys) / normalize_raw(*n.kids[1], sys);
    case K::Pow:
        return normalize_raw(*n.kids[0], sys).pow(n.order);
    case K::Neg:
        return -normalize_raw(*n.kids[0], sys);
    }
    throw Error("normalize_raw: unreachable");
}

mpq_class parse_const_value(Lexer& lx) {
    int sign = 1;
    if (lx.is_sym("-")) {
        lx.next();
        sign = -1;
    }
    if (lx.peek().kind != Token::Kind::Number) lx.fail("expected number");
    mpq_class v = lx.next().value;
    if (lx.is_sym("/")) {
        lx.next();
        if (lx.peek().kind != Token::Kind::Number) lx.fail("expected denominator");
        mpq_class d = lx.next().value;
        if (d == 0) lx.fail("zero denominator");
        v /= d;
    }
    return sign * v;
}

} // namespace

DaeSystem parse_dae(const std::string& source) {
    Lexer lx(source);
    DaeSystem sys;
    bool have_system = false;

    auto declare_check = [&](const std::string& name, const Token& t) {
        if (name == "t" || trans_of(name) || name == "der" || name == "D")
            throw ParseError("reserved identifier '" + name + "'", t.line, t.col);
        if (sys.find_var(name) || sys.const_value(name))
            throw ParseError("duplicate declaration '" + name + "'", t.line, t.col);
        for (auto& f : sys.funcs)
            if (f.name == name)
                throw ParseError("duplicate declaration '" + name + "'", t.line, t.col);
        for (auto& in : sys.inputs)
            if (in == name)
                throw ParseError("duplicate declaration '" + name + "'", t.line, t.col);
        for (auto& c : sys.consts)
            if (c.name == name)
                throw ParseError("duplicate declaration '" + name + "'", t.line, t.col);
    };

    while (lx.peek().kind != Token::Kind::End) {
        Token kw = lx.expect_ident();
        const std::string& k = kw.text;
        if (k == "system") {
            sys.name = lx.expect_ident().text;
            have_system = true;
        } else if (k == "var" || k == "aux") {
            do {
                Token t = lx.expect_ident();
                declare_check(t.text, t);
                if (k == "var") sys.state_names.push_back(t.text);
                else sys.aux_names.push_back(t.text);
            } while (lx.is_sym(",") && (lx.next(), true));
        } else if (k == "fun") {
            do {
                Token t = lx.expect_ident();
                declare_check(t.text, t);
                lx.expect_sym("(");
                if (lx.peek().kind != Token::Kind::Number) lx.fail("expected arity");
                Token a = lx.next();
                lx.expect_sym(")");
                sys.funcs.push_back({t.text, static_cast<int>(a.value.get_num().get_si())});
            } while (lx.is_sym(",") && (lx.next(), true));
        } else if (k == "input") {
            do {
                Token t = lx.expect_ident();
                declare_check(t.text, t);
                sys.inputs.push_back(t.text);
            } while (lx.is_sym(",") && (lx.next(), true));
        } else if (k == "const") {
            do {
                Token t = lx.expect_ident();
                declare_check(t.text, t);
                ConstDecl c{t.text, std::nullopt};
                if (lx.is_sym("=")) {
                    lx.next();
                    c.value = parse_const_value(lx);
                }
                sys.consts.push_back(std::move(c));
            } while (lx.is_sym(",") && (lx.next(), true));
        } else if (k == "eq") {
            Token t = lx.expect_ident();
            for (auto& e : sys.eqs)
                if (e.name == t.text)
                    throw ParseError("duplicate equation '" + t.text + "'", t.line, t.col);
            lx.expect_sym(":");
            ExprParser ep(lx, sys);
            RawPtr raw = ep.parse();
            Expression expr = normalize_raw(*raw, sys);
            sys.eqs.push_back({t.text, std::move(expr), std::move(raw)});
        } else {
            throw ParseError("unknown statement '" + k + "'", kw.line, kw.col);
        }
        lx.expect_sym(";");
    }
    if (!have_system) throw ParseError("missing 'system' statement", 1, 1);
    if (sys.n_eqs() != sys.n_vars())
        throw ParseError("system is not square: " + std::to_string(sys.n_eqs()) +
                             " equations, " + std::to_string(sys.n_vars()) + " variables",
                         1, 1);
    return sys;
}

DaeSystem parse_dae_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dae(ss.str());
}

Expression parse_expression(const DaeSystem& sys, const std::string& text) {
    Lexer lx(text);
    ExprParser ep(lx, sys);
    RawPtr raw = ep.parse();
    if (lx.peek().kind != Token::Kind::End) lx.fail("trailing input");
    return normalize_raw(*raw, sys);
}

ValuePoint parse_point(const DaeSystem& sys, const std::string& text) {
    ValuePoint p;
    sys.bind_consts(p);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected '<atom> = <number>'", lineno, 1);
        std::string lhs = line.substr(0, eq);
        std::string rhs = line.substr(eq + 1);

        Lexer vlx(rhs);
        mpq_class v = parse_const_value(vlx);
        if (vlx.peek().kind != Token::Kind::End)
            throw ParseError("trailing input after number", lineno, 1);

        Expression e = parse_expression(sys, lhs);
        const Poly& n = e.num();
        if (!e.is_polynomial() || n.terms().size() != 1 || n.lead().c != 1 ||
            n.lead().m.f.size() != 1 || n.lead().m.f[0].second != 1)
            throw ParseError("left side must be a single atom", lineno, 1);
        AtomId id = n.lead().m.f[0].first;
        const AtomData& a = atom(id);
        switch (a.kind) {
        case AtomKind::Time: p.set_time(Value::rat(v)); break;
        case AtomKind::State: p.set_var({false, a.var}, a.order, Value::rat(v)); break;
        case AtomKind::Aux: p.set_var({true, a.var}, a.order, Value::rat(v)); break;
        case AtomKind::Driving: p.set_driving(a.name, a.order, Value::rat(v)); break;
        case AtomKind::Param: p.set_param(a.name, Value::rat(v)); break;
        case AtomKind::FuncApp: p.set_func_stub(a.name, a.dmulti, Value::rat(v)); break;
        default:
            throw ParseError("left side cannot be bound", lineno, 1);
        }
    }
    return p;
}

ValuePoint parse_point_file(const DaeSystem& sys, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_point(sys, ss.str());
}

} // namespace sigreg
