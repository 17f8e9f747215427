#pragma once

#include "sigreg/atom.hpp"

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>

namespace sigreg {

/// Exact-or-floating scalar. Exact values stay rational through +,-,*,/;
/// transcendental evaluation switches to floating.
struct Value {
    bool exact = true;
    mpq_class q;
    double d = 0.0;

    static Value rat(const mpq_class& v) { return {true, v, v.get_d()}; }
    static Value flt(double v) { return {false, 0, v}; }
    double as_double() const { return exact ? q.get_d() : d; }
};

/// Binding of atoms to numeric values for evaluation: t, derivatives of state
/// and auxiliary variables, driving-function derivatives, and numeric stubs
/// for uninterpreted-function partials (keyed by name and multi-index, the
/// arguments are implied by the point).
class ValuePoint {
public:
    void set_time(const Value& v);
    void set_var(VarRef var, int order, const Value& v);
    void set_driving(const std::string& name, int order, const Value& v);
    void set_param(const std::string& name, const Value& v);
    void set_func_stub(const std::string& name, const std::vector<int>& dmulti, const Value& v);

    std::optional<Value> time() const;
    std::optional<Value> var(VarRef v, int order) const;
    std::optional<Value> driving(const std::string& name, int order) const;
    std::optional<Value> param(const std::string& name) const;
    std::optional<Value> func_stub(const std::string& name, const std::vector<int>& dmulti) const;

private:
    std::optional<Value> time_;
    std::map<std::pair<std::pair<bool, int>, int>, Value> vars_;
    std::map<std::pair<std::string, int>, Value> driving_;
    std::map<std::string, Value> params_;
    std::map<std::pair<std::string, std::vector<int>>, Value> stubs_;
};

} // namespace sigreg
