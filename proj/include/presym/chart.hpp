#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace presym {

struct ChartMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A coordinate chart: an ordered list of variable names. A subset of the
// variables can be marked as parameters: polynomial arithmetic sees them,
// the exterior calculus treats them as constants (no d, no index slot).
class Chart {
public:
    using Ptr = std::shared_ptr<const Chart>;

    static Ptr make(std::string name, std::vector<std::string> vars,
                    std::vector<std::string> params = {});

    const std::string& name() const { return name_; }
    const std::vector<std::string>& vars() const { return vars_; }
    int size() const { return static_cast<int>(vars_.size()); }
    bool is_param(int i) const { return is_param_[i]; }
    const std::string& var_name(int i) const { return vars_[i]; }

    int index_of(const std::string& v) const;      // -1 if absent
    int require_index(const std::string& v) const;  // throws if absent

    // Indices of the non-parameter (dynamical) variables, in chart order.
    const std::vector<int>& dyn_indices() const { return dyn_; }
    int dyn_count() const { return static_cast<int>(dyn_.size()); }

    bool same_as(const Chart& o) const {
        return vars_ == o.vars_ && is_param_ == o.is_param_;
    }

    // New chart with extra parameter variables appended (existing indices keep
    // their meaning). Used for the free parameters of solution families.
    Ptr extended_with_params(const std::vector<std::string>& extra,
                             const std::string& new_name = "") const;

    // New chart with the given variable indices removed.
    Ptr without(const std::vector<int>& removed, const std::string& new_name = "") const;

private:
    Chart() = default;
    std::string name_;
    std::vector<std::string> vars_;
    std::vector<bool> is_param_;
    std::vector<int> dyn_;
    std::unordered_map<std::string, int> index_;
};

inline void require_same_chart(const Chart::Ptr& a, const Chart::Ptr& b) {
    if (a == b) return;
    if (a && b && a->same_as(*b)) return;
    throw ChartMismatch("operands live on different charts");
}

}  // namespace presym
