#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigreg/expr.hpp"
#include "sigreg/point.hpp"

#include <random>

using namespace sigreg;

namespace {

Expression x(int j, int k = 0) { return Expression::var({false, j}, k); }

// Random polynomial over derivatives of x0..x2 of order <= max_order.
Expression random_poly(std::mt19937_64& rng, int max_order = 2, int terms = 5) {
    std::uniform_int_distribution<int> coeff(-6, 6);
    std::uniform_int_distribution<int> var(0, 2);
    std::uniform_int_distribution<int> order(0, max_order);
    std::uniform_int_distribution<int> exp(1, 2);
    std::uniform_int_distribution<int> nfac(0, 2);
    Expression acc;
    for (int t = 0; t < terms; ++t) {
        int c = coeff(rng);
        if (c == 0) c = 1;
        Expression term(static_cast<long>(c));
        int facs = nfac(rng);
        for (int f = 0; f <= facs; ++f)
            term = term * x(var(rng), order(rng)).pow(exp(rng));
        acc = acc + term;
    }
    return acc;
}

} // namespace

TEST_CASE("normalization cancels the formal leading derivative") {
    // (x1*x2)' - x1'*x2 leaves x1*x2'
    Expression e = (x(0) * x(1)).total_derivative(1) - x(0, 1) * x(1);
    CHECK(e == x(0) * x(1, 1));
    CHECK(e.hod({false, 0}) == 0);
    CHECK(e.hod({false, 1}) == 1);
}

TEST_CASE("transcendental atoms stay algebraically independent") {
    // x' + cos^2 x'' + sin^2 x'' formally depends on x'' and the tool keeps it
    Expression arg = x(0, 2);
    Expression e = x(0, 1) +
                   Expression::atom(atom_trans(TransOp::Cos, arg)).pow(2) +
                   Expression::atom(atom_trans(TransOp::Sin, arg)).pow(2);
    CHECK(e.hod({false, 0}) == 2);
}

TEST_CASE("subtraction of equal expressions is zero") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        Expression e = random_poly(rng);
        CHECK(is_identically_zero(e - e));
    }
    Expression q = (x(0) + x(1)) / (x(0) - x(1));
    CHECK(is_identically_zero(q - q));
}

TEST_CASE("total derivative of the pendulum constraint") {
    Expression L = Expression::param("L");
    Expression f3 = x(0).pow(2) + x(1).pow(2) - L.pow(2);
    Expression d = f3.total_derivative(1);
    Expression expected = Expression(2L) * x(0) * x(0, 1) + Expression(2L) * x(1) * x(1, 1);
    CHECK(d == expected);
    CHECK(f3.total_derivative(0) == f3);
}

TEST_CASE("total derivative of an uninterpreted function application") {
    std::vector<Expression> args{x(0), x(1)};
    Expression F = Expression::atom(atom_funcapp("F", {0, 0}, args));
    Expression d = F.total_derivative(1);
    Expression Fx1 = Expression::atom(atom_funcapp("F", {1, 0}, args));
    Expression Fx2 = Expression::atom(atom_funcapp("F", {0, 1}, args));
    CHECK(d == Fx1 * x(0, 1) + Fx2 * x(1, 1));
}

TEST_CASE("formal partials of the pendulum row") {
    Expression lambda = x(2);
    Expression f1 = x(0, 2) + x(0) * lambda;
    CHECK(f1.partial(atom_state(0, 2)) == Expression(1L));
    CHECK(f1.partial(atom_state(2, 0)) == x(0));
    CHECK(is_identically_zero(f1.partial(atom_state(1, 0))));
}

TEST_CASE("hod on products and constants") {
    Expression e = x(0) * x(1, 1);
    CHECK(e.hod({false, 0}) == 0);
    CHECK(e.hod({false, 1}) == 1);
    CHECK(Expression(5L).hod({false, 0}) == NEG_INF);
}

TEST_CASE("hod sees derivatives inside transcendental arguments") {
    // f1 of the exponential example: x1 + e^{-x1' - x2 x2''} + g1(t)
    Expression arg = -x(0, 1) - x(1) * x(1, 2);
    Expression f1 = x(0) + Expression::atom(atom_trans(TransOp::Exp, arg)) +
                    Expression::atom(atom_driving("g1", 0));
    CHECK(f1.hod({false, 1}) == 2);
    CHECK(f1.hod({false, 0}) == 1);
}

TEST_CASE("exact evaluation") {
    Expression e = Expression(-2L) * (x(0).pow(2) + x(1).pow(2));
    ValuePoint p;
    p.set_var({false, 0}, 0, Value::rat(3));
    p.set_var({false, 1}, 0, Value::rat(4));
    Value v = e.evaluate(p);
    CHECK(v.exact);
    CHECK(v.q == -50);
}

TEST_CASE("evaluation reports zero denominators and missing bindings") {
    Expression q = Expression(1L) / x(0);
    ValuePoint p;
    p.set_var({false, 0}, 0, Value::rat(0));
    CHECK_THROWS_AS(q.evaluate(p), Error);
    ValuePoint empty;
    CHECK_THROWS_AS(x(0).evaluate(empty), Error);
}

TEST_CASE("identically zero detection") {
    CHECK(is_identically_zero(Expression()));
    CHECK(!is_identically_zero(x(0).pow(2) - x(1).pow(2)));
    // A2-style cancellation: x*y - y*x
    CHECK(is_identically_zero(x(0) * x(1) - x(1) * x(0)));
    // randomized self-check: nonzero forms evaluate nonzero somewhere
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10; ++i) {
        Expression e = random_poly(rng);
        if (!is_identically_zero(e)) CHECK(identity_selfcheck(e, 1234 + i));
    }
}

TEST_CASE("Griewank's lemma on random polynomials") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 100; ++rep) {
        Expression e = random_poly(rng);
        for (int j = 0; j < 3; ++j) {
            int h = e.hod({false, j});
            int q = (h == NEG_INF ? 0 : h) + (rep % 2);  // q >= hod
            for (int p = 1; p <= 3; ++p) {
                Expression lhs = e.partial(atom_state(j, q));
                Expression rhs = e.total_derivative(p).partial(atom_state(j, q + p));
                CHECK(is_identically_zero(lhs - rhs));
            }
        }
    }
}

TEST_CASE("derivative satisfies the product rule after normalization") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 25; ++rep) {
        Expression a = random_poly(rng, 1, 3);
        Expression b = random_poly(rng, 1, 3);
        Expression lhs = (a * b).total_derivative(1);
        Expression rhs = a.total_derivative(1) * b + a * b.total_derivative(1);
        CHECK(is_identically_zero(lhs - rhs));
    }
}

TEST_CASE("hod shifts by the differentiation order") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 25; ++rep) {
        Expression e = random_poly(rng);
        for (int j = 0; j < 3; ++j) {
            int h = e.hod({false, j});
            if (h == NEG_INF) continue;
            for (int p = 1; p <= 3; ++p)
                CHECK(e.total_derivative(p).hod({false, j}) == h + p);
        }
    }
}

TEST_CASE("partials agree with central finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    const double step = 1e-5;
    for (int rep = 0; rep < 20; ++rep) {
        Expression e = random_poly(rng, 1, 4);
        // add a transcendental term so the chain rule is exercised
        e = e + Expression::atom(atom_trans(TransOp::Sin, x(0) + x(1, 1)));
        AtomId target = atom_state(rep % 2, rep % 2);
        Expression de = e.partial(target);

        ValuePoint p0;
        double base = 0;
        std::vector<std::pair<std::pair<int, int>, double>> binds;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k <= 2; ++k) binds.push_back({{j, k}, val(rng)});
        auto eval_at = [&](double shift) {
            ValuePoint p;
            for (auto& [vk, v] : binds) {
                double vv = v;
                if (atom_state(vk.first, vk.second) == target) vv += shift;
                p.set_var({false, vk.first}, vk.second, Value::flt(vv));
            }
            return e.evaluate(p).as_double();
        };
        ValuePoint pc;
        for (auto& [vk, v] : binds)
            pc.set_var({false, vk.first}, vk.second, Value::flt(v));
        double fd = (eval_at(step) - eval_at(-step)) / (2 * step);
        double an = de.evaluate(pc).as_double();
        double scale = std::max({1.0, std::abs(fd), std::abs(an)});
        CHECK(std::abs(fd - an) / scale < 1e-6);
        (void)base;
        (void)p0;
    }
}

TEST_CASE("rational normal form cancels shared factors") {
    Expression a = x(0).pow(2) - x(1).pow(2);
    Expression b = x(0) - x(1);
    Expression q = a / b;
    // heuristic cancellation via exact division
    CHECK(q == x(0) + x(1));

    // robot-arm style: (2/(2-c^2)) / ((2+c)/(2-c^2)) = 2/(2+c)
    Expression c = Expression::atom(atom_trans(TransOp::Cos, x(2)));
    Expression a3 = Expression(2L) / (Expression(2L) - c.pow(2));
    Expression b3 = c / (Expression(2L) - c.pow(2));
    Expression ratio = a3 / (a3 + b3);
    CHECK(ratio == Expression(2L) / (Expression(2L) + c));
}

TEST_CASE("integer powers and division by zero expression") {
    CHECK(x(0).pow(0) == Expression(1L));
    CHECK_THROWS_AS(x(0) / Expression(), Error);
    Expression half = Expression(1L) / Expression(2L);
    CHECK(half.as_constant() == mpq_class(1, 2));
}

TEST_CASE("substitution replaces atoms inside composite arguments") {
    Expression e = Expression::atom(atom_trans(TransOp::Exp, x(0) + x(1)));
    Expression r = e.substitute(atom_state(0, 0), x(2) * x(2));
    Expression expected = Expression::atom(atom_trans(TransOp::Exp, x(2) * x(2) + x(1)));
    CHECK(r == expected);
}

TEST_CASE("canonical serialization is deterministic and order independent") {
    Expression e1 = x(0) * x(1) + x(2).pow(2);
    Expression e2 = x(2).pow(2) + x(1) * x(0);
    CHECK(e1.str() == e2.str());
}
