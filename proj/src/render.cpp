#include "sigreg/parse.hpp"

#include <sstream>

namespace sigreg {

std::string render_dae(const DaeSystem& sys) {
    std::ostringstream os;
    os << "system " << sys.name << ";\n";
    if (!sys.state_names.empty()) {
        os << "var ";
        for (size_t i = 0; i < sys.state_names.size(); ++i)
            os << (i ? ", " : "") << sys.state_names[i];
        os << ";\n";
    }
    if (!sys.aux_names.empty()) {
        os << "aux ";
        for (size_t i = 0; i < sys.aux_names.size(); ++i)
            os << (i ? ", " : "") << sys.aux_names[i];
        os << ";\n";
    }
    if (!sys.funcs.empty()) {
        os << "fun ";
        for (size_t i = 0; i < sys.funcs.size(); ++i)
            os << (i ? ", " : "") << sys.funcs[i].name << "(" << sys.funcs[i].arity << ")";
        os << ";\n";
    }
    if (!sys.inputs.empty()) {
        os << "input ";
        for (size_t i = 0; i < sys.inputs.size(); ++i)
            os << (i ? ", " : "") << sys.inputs[i];
        os << ";\n";
    }
    for (auto& c : sys.consts) {
        os << "const " << c.name;
        if (c.value) os << " = " << c.value->get_str();
        os << ";\n";
    }
    auto names = sys.namer();
    for (auto& e : sys.eqs)
        os << "eq " << e.name << ": " << e.expr.str(names) << ";\n";
    return os.str();
}

} // namespace sigreg
