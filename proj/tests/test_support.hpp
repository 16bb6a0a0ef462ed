#pragma once

// Helpers shared by the unit and acceptance suites.

#include <functional>
#include <string>
#include <vector>

#include "its/network.hpp"
#include "its/tensor.hpp"

namespace its::testing {

/// Pointers to every parameter tensor in traversal order.
inline std::vector<std::pair<std::string, Tensor*>> parameter_slots(ItsParameters& params) {
    std::vector<std::pair<std::string, Tensor*>> out;
    for_each_parameter(params, [&](const std::string& name, bool, Tensor& t) {
        out.emplace_back(name, &t);
    });
    return out;
}

struct GroupCheck {
    std::string name;
    double max_rel_err = 0.0;
};

struct EndToEndGradCheck {
    std::vector<GroupCheck> groups;
    double max_rel_err = 0.0;
    bool passed = false;
};

/// Central-difference check of d(loss)/d(theta) for every parameter tensor.
/// `taped_loss` must evaluate the loss through the tape machinery on watched
/// parameters; `plain_loss` must evaluate the identical quantity on plain
/// parameters.
inline EndToEndGradCheck check_parameter_gradients(
    const ItsParameters& params,
    const std::function<Tensor(const ItsParameters& taped)>& taped_loss,
    const std::function<double(const ItsParameters&)>& plain_loss, double step, double tol) {
    Tape tape;
    const ItsParameters taped = watch_parameters(tape, params);
    const Tensor loss = taped_loss(taped);
    const GradientMap grad_map = tape.backward(loss);
    const std::vector<Array> analytic = parameter_gradients(grad_map, taped);

    ItsParameters probe = params;
    const auto slots = parameter_slots(probe);

    EndToEndGradCheck report;
    for (std::size_t g = 0; g < slots.size(); ++g) {
        GroupCheck group{slots[g].first, 0.0};
        Tensor& t = *slots[g].second;
        const Tensor original = t;
        for (Index i = 0; i < original.size(); ++i) {
            Array plus = original.array();
            Array minus = original.array();
            plus[i] += step;
            minus[i] -= step;
            t = Tensor(original.shape(), std::move(plus));
            const double up = plain_loss(probe);
            t = Tensor(original.shape(), std::move(minus));
            const double down = plain_loss(probe);
            const double numeric = (up - down) / (2.0 * step);
            group.max_rel_err =
                std::max(group.max_rel_err, relative_error(analytic[g][i], numeric));
        }
        t = original;
        report.max_rel_err = std::max(report.max_rel_err, group.max_rel_err);
        report.groups.push_back(std::move(group));
    }
    report.passed = report.max_rel_err <= tol;
    return report;
}

}  // namespace its::testing
