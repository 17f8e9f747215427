#include "sigreg/tableau.hpp"

#include <iomanip>
#include <sstream>

namespace sigreg {

namespace {

std::string cell_text(int s, bool starred) {
    std::string t = s == NEG_INF ? "-" : std::to_string(s);
    if (starred) t += "*";
    return t;
}

} // namespace

std::string render_tableau(const DaeSystem& sys, const SignatureMatrix& sigma,
                           const Offsets* off) {
    int n = sigma.n;
    std::vector<std::string> row_names, col_names;
    for (int i = 0; i < n; ++i) row_names.push_back(sys.eqs[i].name);
    for (int j = 0; j < n; ++j) col_names.push_back(sys.var_name(sys.var_of_column(j)));

    std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cells[i][j] = cell_text(sigma.s[i][j],
                                    sigma.hvt && (*sigma.hvt)[i] == j);

    size_t name_w = 2;
    for (auto& r : row_names) name_w = std::max(name_w, r.size());
    std::vector<size_t> col_w(n, 1);
    for (int j = 0; j < n; ++j) {
        col_w[j] = std::max(col_w[j], col_names[j].size());
        for (int i = 0; i < n; ++i) col_w[j] = std::max(col_w[j], cells[i][j].size());
    }

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << "";
    for (int j = 0; j < n; ++j)
        os << std::setw(static_cast<int>(col_w[j]) + 2) << col_names[j];
    if (off) os << "c_i";
    os << "\n";
    for (int i = 0; i < n; ++i) {
        os << std::setw(static_cast<int>(name_w) + 2) << row_names[i];
        for (int j = 0; j < n; ++j)
            os << std::setw(static_cast<int>(col_w[j]) + 2) << cells[i][j];
        if (off) os << off->c[i];
        os << "\n";
    }
    if (off) {
        os << std::setw(static_cast<int>(name_w) + 2) << "d_j";
        for (int j = 0; j < n; ++j)
            os << std::setw(static_cast<int>(col_w[j]) + 2) << off->d[j];
    }
    if (sigma.finite()) {
        os << "Val = " << sigma.val;
    } else {
        os << "Val = -inf (structurally ill-posed)";
    }
    os << "\n";
    return os.str();
}

ParsedTableau parse_tableau(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("parse_tableau: empty input");
    // header: count columns
    std::istringstream hdr(line);
    std::vector<std::string> cols;
    std::string tok;
    while (hdr >> tok)
        if (tok != "c_i") cols.push_back(tok);
    int n = static_cast<int>(cols.size());

    ParsedTableau pt;
    pt.s.assign(n, std::vector<int>(n, NEG_INF));
    pt.hvt.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw Error("parse_tableau: truncated");
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        for (int j = 0; j < n; ++j) {
            std::string c;
            ls >> c;
            bool star = !c.empty() && c.back() == '*';
            if (star) c.pop_back();
            if (c == "-") pt.s[i][j] = NEG_INF;
            else pt.s[i][j] = std::stoi(c);
            if (star) pt.hvt[i] = j;
        }
    }
    return pt;
}

std::string render_jacobian(const DaeSystem& sys, const SystemJacobian& J) {
    std::ostringstream os;
    auto names = sys.namer();
    os << "J (" << classification_name(J.cls) << ")\n";
    for (int i = 0; i < J.n; ++i) {
        os << "  [";
        for (int j = 0; j < J.n; ++j)
            os << (j ? ", " : " ") << J.entries[i][j].str(names);
        os << " ]\n";
    }
    if (J.det) os << "det(J) = " << J.det->str(names) << "\n";
    return os.str();
}

namespace {

std::string deriv_name(const std::string& base, int order) {
    if (order == 0) return base;
    if (order <= 2) return base + std::string(order, '\'');
    return base + "^(" + std::to_string(order) + ")";
}

} // namespace

std::string render_scheme(const DaeSystem& sys, const SolutionScheme& sch) {
    std::ostringstream os;
    os << "stage k    solve                     for\n";
    for (auto& st : sch.stages) {
        std::ostringstream eqs, vars;
        for (size_t q = 0; q < st.equations.size(); ++q) {
            auto [i, ord] = st.equations[q];
            eqs << (q ? ", " : "") << deriv_name(sys.eqs[i].name, ord);
        }
        for (size_t q = 0; q < st.unknowns.size(); ++q) {
            auto [j, ord] = st.unknowns[q];
            vars << (q ? ", " : "") << deriv_name(sys.var_name(sys.var_of_column(j)), ord);
        }
        os << std::left << std::setw(11) << st.k << std::setw(26) << ("0 = " + eqs.str())
           << vars.str() << "\n";
    }
    return os.str();
}

std::string render_report(const DaeSystem& sys, const AnalysisReport& rep) {
    std::ostringstream os;
    auto names = rep.final_system ? rep.final_system->namer() : sys.namer();
    const DaeSystem* cur = &sys;
    std::vector<const DaeSystem*> chain;
    // reconstruct the chain of systems along the conversion trail
    chain.push_back(cur);
    const DaeSystem* fin = rep.final_system.get();
    std::vector<const DaeSystem*> back;
    for (const DaeSystem* s = fin; s && s != cur; s = s->parent.get())
        back.push_back(s);
    for (auto it = back.rbegin(); it != back.rend(); ++it) chain.push_back(*it);

    for (size_t k = 0; k < rep.iterations.size(); ++k) {
        const IterationRecord& rec = rep.iterations[k];
        const DaeSystem& s = k < chain.size() ? *chain[k] : *rep.final_system;
        os << "== iteration " << k << " ==\n";
        os << render_tableau(s, rec.sigma, rec.sigma.finite() ? &rec.offsets : nullptr);
        if (rec.sigma.finite()) {
            os << "structural index nu_S = " << rec.index;
            if (rec.cls != Classification::GenericallyNonsingular)
                os << "  (unreliable: SA failed)";
            os << "\nDOF = " << rec.dof << "\n";
            os << "Jacobian: " << classification_name(rec.cls) << "\n";
            if (rec.det) os << "det(J) = " << rec.det->str(s.namer()) << "\n";
        }
        if (rec.lc_refused) {
            os << "LC refused:";
            for (auto& sl : rec.lc_refused->slack)
                if (!sl.ok)
                    os << "  hod(" << s.var_name(s.var_of_column(sl.var_column))
                       << ", u) = " << sl.hod_u << " !< " << sl.bound
                       << " = d_j - theta";
            os << "\n";
        }
        if (rec.es_refused) {
            os << "ES refused:";
            for (auto& m : rec.es_refused->order_margins)
                if (!m.ok)
                    os << "  d_" << s.var_name(s.var_of_column(m.var_column)) << " - C = "
                       << m.margin << " < 0";
            for (auto& m : rec.es_refused->hod_margins)
                if (!m.ok)
                    os << "  hod(" << s.var_name(s.var_of_column(m.var_column))
                       << ", u) = " << m.hod_u << " > " << m.bound;
            os << "\n";
        }
        if (rec.step) {
            const ConversionStep& st = *rec.step;
            auto snames = s.namer();
            os << "conversion: " << (st.method == ConversionMethod::LC ? "LC" : "ES")
               << " pivot " << st.pivot << ", u = (";
            for (size_t i = 0; i < st.u.size(); ++i)
                os << (i ? ", " : "") << st.u[i].str(snames);
            os << "), Val " << st.val_before << " -> " << st.val_after << "\n";
            os << "equivalence condition: " << st.equivalence_condition.str(snames)
               << (st.always_nonzero ? " (nonzero constant, always equivalent)\n"
                                     : " != 0\n");
        }
    }
    os << "verdict: " << verdict_name(rep.verdict) << "\n";
    if (!rep.detail.empty()) os << rep.detail << "\n";
    if (!rep.ledger.empty()) {
        os << "equivalence ledger:";
        for (auto& e : rep.ledger)
            os << " [" << e.condition.str(names) << (e.always_nonzero ? " const" : " != 0")
               << "]";
        os << "\n";
    }
    return os.str();
}

} // namespace sigreg
