#pragma once

#include "sigreg/expr.hpp"
#include "sigreg/point.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sigreg {

// Raw expression tree as parsed, kept so the formal signature matrix can be
// computed without normalization.
struct RawNode;
using RawPtr = std::shared_ptr<const RawNode>;

struct RawNode {
    enum class Kind {
        Number, Time, Var, Param, Driving, Call, Trans, Der,
        Add, Sub, Mul, Div, Pow, Neg
    };
    Kind kind;
    mpq_class value;            // Number
    VarRef var{};               // Var
    int order = 0;              // Var prime count / Der order / Pow exponent
    std::string name;           // Param/Driving/Call
    std::vector<int> dmulti;    // Call partial multi-index
    TransOp op = TransOp::Sin;  // Trans
    std::vector<RawPtr> kids;
};

struct FuncDecl {
    std::string name;
    int arity = 0;
};

struct ConstDecl {
    std::string name;
    std::optional<mpq_class> value;
};

struct Equation {
    std::string name;
    Expression expr;   // normalized; equation reads expr = 0
    RawPtr raw;        // absent for equations produced by conversion steps
};

struct ConversionStep;

struct DaeSystem {
    std::string name;
    std::vector<std::string> state_names;
    std::vector<std::string> aux_names;
    std::vector<FuncDecl> funcs;
    std::vector<std::string> inputs;
    std::vector<ConstDecl> consts;
    std::vector<Equation> eqs;

    std::shared_ptr<const DaeSystem> parent;          // provenance
    std::shared_ptr<const ConversionStep> parent_step;

    int n_states() const { return static_cast<int>(state_names.size()); }
    int n_aux() const { return static_cast<int>(aux_names.size()); }
    int n_vars() const { return n_states() + n_aux(); }
    int n_eqs() const { return static_cast<int>(eqs.size()); }

    VarRef var_of_column(int j) const {
        if (j < n_states()) return {false, j};
        return {true, j - n_states()};
    }
    int column_of(VarRef v) const { return v.aux ? n_states() + v.idx : v.idx; }
    std::string var_name(VarRef v) const {
        return v.aux ? aux_names[v.idx] : state_names[v.idx];
    }
    std::function<std::string(VarRef)> namer() const {
        return [this](VarRef v) { return var_name(v); };
    }

    std::optional<VarRef> find_var(const std::string& name) const;
    std::optional<mpq_class> const_value(const std::string& name) const;

    /// Fold all constants that carry declared values into the equations.
    DaeSystem folded() const;

    /// Seed a ValuePoint with declared constant values.
    void bind_consts(ValuePoint& p) const;
};

enum class ConversionMethod { LC, ES };

struct EsSubstitution {
    int eq = 0;            // equation index i
    VarRef var;            // substituted variable x_j
    int order = 0;         // order of the replaced derivative occurrence
};

struct ConversionStep {
    ConversionMethod method = ConversionMethod::LC;
    std::vector<Expression> u;      // kernel vector (left for LC, right for ES)
    int pivot = -1;                 // row l (LC) or column l (ES)
    std::vector<int> replaced;      // equation indices replaced
    std::vector<std::string> added; // names of appended equations (ES)
    Expression equivalence_condition;  // u_l, must stay nonzero
    bool always_nonzero = false;       // u_l is a nonzero rational constant
    long long val_before = 0;
    long long val_after = 0;

    // offsets of the source system used by the step
    std::vector<int> c_used;
    std::vector<int> d_used;

    // LC details
    std::vector<int> index_set_I;
    int theta = 0;
    std::vector<int> candidate_set_L;

    // ES details
    std::vector<int> es_L;   // columns with u_j not identically zero
    std::vector<int> es_I;
    int es_C = 0;
    std::vector<EsSubstitution> substitutions;
    std::vector<std::pair<int, int>> es_aux_of_column;  // column j -> aux index
};

} // namespace sigreg
