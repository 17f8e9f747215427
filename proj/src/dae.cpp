#include "sigreg/dae.hpp"

namespace sigreg {

std::optional<VarRef> DaeSystem::find_var(const std::string& name) const {
    for (int i = 0; i < n_states(); ++i)
        if (state_names[i] == name) return VarRef{false, i};
    for (int i = 0; i < n_aux(); ++i)
        if (aux_names[i] == name) return VarRef{true, i};
    return std::nullopt;
}

std::optional<mpq_class> DaeSystem::const_value(const std::string& name) const {
    for (auto& c : consts)
        if (c.name == name) return c.value;
    return std::nullopt;
}

DaeSystem DaeSystem::folded() const {
    DaeSystem out = *this;
    for (auto& eq : out.eqs) {
        Expression e = eq.expr;
        for (auto& c : consts)
            if (c.value)
                e = e.substitute(atom_param(c.name), Expression(*c.value));
        eq.expr = e;
    }
    return out;
}

void DaeSystem::bind_consts(ValuePoint& p) const {
    for (auto& c : consts)
        if (c.value) p.set_param(c.name, Value::rat(*c.value));
}

} // namespace sigreg
