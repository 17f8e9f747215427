#include "sigreg/point.hpp"

namespace sigreg {

void ValuePoint::set_time(const Value& v) { time_ = v; }

void ValuePoint::set_var(VarRef var, int order, const Value& v) {
    vars_[{{var.aux, var.idx}, order}] = v;
}

void ValuePoint::set_driving(const std::string& name, int order, const Value& v) {
    driving_[{name, order}] = v;
}

void ValuePoint::set_param(const std::string& name, const Value& v) {
    params_[name] = v;
}

void ValuePoint::set_func_stub(const std::string& name, const std::vector<int>& dmulti,
                               const Value& v) {
    stubs_[{name, dmulti}] = v;
}

std::optional<Value> ValuePoint::time() const { return time_; }

std::optional<Value> ValuePoint::var(VarRef v, int order) const {
    auto it = vars_.find({{v.aux, v.idx}, order});
    if (it == vars_.end()) return std::nullopt;
    return it->second;
}

std::optional<Value> ValuePoint::driving(const std::string& name, int order) const {
    auto it = driving_.find({name, order});
    if (it == driving_.end()) return std::nullopt;
    return it->second;
}

std::optional<Value> ValuePoint::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) return std::nullopt;
    return it->second;
}

std::optional<Value> ValuePoint::func_stub(const std::string& name,
                                           const std::vector<int>& dmulti) const {
    auto it = stubs_.find({name, dmulti});
    if (it == stubs_.end()) return std::nullopt;
    return it->second;
}

} // namespace sigreg
