#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sigreg {

class Expression;

/// Index of a variable column in a DAE: either a state variable x_j or an
/// auxiliary variable y_j introduced by a conversion step.
struct VarRef {
    bool aux = false;
    int idx = 0;
    friend bool operator==(const VarRef&, const VarRef&) = default;
    friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

enum class AtomKind : std::uint8_t {
    Time = 0,    // t
    Param,       // named symbolic constant (L, g, ...)
    Driving,     // k-th derivative of a driving function of t
    FuncApp,     // partial derivative of an uninterpreted function, applied to args
    Trans,       // sin/cos/exp/ln of an expression
    State,       // k-th derivative of state variable x_j (k = 0 is x_j itself)
    Aux,         // k-th derivative of auxiliary variable y_j
};

enum class TransOp : std::uint8_t { Sin = 0, Cos, Exp, Ln };

using AtomId = std::uint32_t;

struct AtomData {
    AtomKind kind = AtomKind::Time;
    int var = -1;                   // State/Aux variable index
    int order = 0;                  // State/Aux/Driving derivative order
    std::string name;               // Driving/FuncApp/Param name
    std::vector<int> dmulti;        // FuncApp partial multi-index, one per argument
    std::vector<Expression> args;   // FuncApp arguments (normalized)
    TransOp op = TransOp::Sin;      // Trans operator
};

// Atoms are interned: equal atoms share one AtomId, so atom equality is id
// equality. The registry is append-only and guarded by a mutex.
AtomId atom_time();
AtomId atom_param(const std::string& name);
AtomId atom_driving(const std::string& name, int order);
AtomId atom_state(int var, int order);
AtomId atom_aux(int var, int order);
AtomId atom_var(VarRef v, int order);
AtomId atom_funcapp(const std::string& name, std::vector<int> dmulti,
                    std::vector<Expression> args);
AtomId atom_trans(TransOp op, const Expression& arg);

const AtomData& atom(AtomId id);

/// Structural total order on atoms (kind first, then payload; composite atoms
/// compare recursively). Used for the canonical monomial order.
int atom_cmp(AtomId a, AtomId b);

/// Shift a derivative atom's order by p (State/Aux/Driving only).
AtomId atom_shift_order(AtomId id, int p);

/// Key used for canonical serialization; independent of interning order.
const std::string& atom_key(AtomId id);

/// Human-readable rendering; `names(v)` resolves variable columns to names.
std::string atom_to_string(AtomId id,
                           const std::function<std::string(VarRef)>& names);

const char* trans_op_name(TransOp op);

} // namespace sigreg
