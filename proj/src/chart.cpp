#include "presym/chart.hpp"

#include <algorithm>
#include <set>

namespace presym {

Chart::Ptr Chart::make(std::string name, std::vector<std::string> vars,
                       std::vector<std::string> params) {
    auto c = std::shared_ptr<Chart>(new Chart());
    c->name_ = std::move(name);
    c->vars_ = std::move(vars);
    c->is_param_.assign(c->vars_.size(), false);
    for (size_t i = 0; i < c->vars_.size(); ++i) {
        if (c->vars_[i].empty())
            throw std::invalid_argument("empty variable name in chart");
        auto [it, fresh] = c->index_.emplace(c->vars_[i], static_cast<int>(i));
        if (!fresh)
            throw std::invalid_argument("duplicate variable name: " + c->vars_[i]);
    }
    for (const auto& p : params) {
        auto it = c->index_.find(p);
        if (it == c->index_.end())
            throw std::invalid_argument("parameter " + p + " is not a chart variable");
        c->is_param_[it->second] = true;
    }
    for (size_t i = 0; i < c->vars_.size(); ++i)
        if (!c->is_param_[i]) c->dyn_.push_back(static_cast<int>(i));
    return c;
}

int Chart::index_of(const std::string& v) const {
    auto it = index_.find(v);
    return it == index_.end() ? -1 : it->second;
}

int Chart::require_index(const std::string& v) const {
    int i = index_of(v);
    if (i < 0) throw std::invalid_argument("unknown variable name: " + v);
    return i;
}

Chart::Ptr Chart::extended_with_params(const std::vector<std::string>& extra,
                                       const std::string& new_name) const {
    std::vector<std::string> vars = vars_;
    std::vector<std::string> params;
    for (size_t i = 0; i < vars_.size(); ++i)
        if (is_param_[i]) params.push_back(vars_[i]);
    for (const auto& e : extra) {
        vars.push_back(e);
        params.push_back(e);
    }
    return make(new_name.empty() ? name_ : new_name, std::move(vars), std::move(params));
}

Chart::Ptr Chart::without(const std::vector<int>& removed, const std::string& new_name) const {
    std::set<int> drop(removed.begin(), removed.end());
    std::vector<std::string> vars, params;
    for (size_t i = 0; i < vars_.size(); ++i) {
        if (drop.count(static_cast<int>(i))) continue;
        vars.push_back(vars_[i]);
        if (is_param_[i]) params.push_back(vars_[i]);
    }
    return make(new_name.empty() ? name_ : new_name, std::move(vars), std::move(params));
}

}  // namespace presym
