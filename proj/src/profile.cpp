#include "heatctrl/profile.hpp"

#include <algorithm>
#include <cmath>

#include "heatctrl/error.hpp"

namespace heatctrl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_table(const Profile::Table& table) {
    if (table.xs.empty() || table.xs.size() != table.values.size()) {
        throw ValidationError("table", "needs matching, non-empty x and value lists");
    }
    for (std::size_t i = 1; i < table.xs.size(); ++i) {
        if (!(table.xs[i] > table.xs[i - 1])) {
            throw ValidationError("table", "x samples must be strictly increasing");
        }
    }
}

}  // namespace

Profile::Profile(Variant repr) : repr_(std::move(repr)) {
    if (const auto* table = std::get_if<Table>(&repr_)) {
        check_table(*table);
    }
}

Profile Profile::table(std::vector<double> xs, std::vector<double> values) {
    return Profile(Table{std::move(xs), std::move(values)});
}

double Profile::operator()(double x) const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [x](const Mode& m) { return m.amplitude * std::cos(m.rho * x); },
            [x](const Polynomial& p) {
                double acc = 0.0;
                for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
                    acc = acc * x + *it;
                }
                return acc;
            },
            [x](const Table& t) {
                if (x <= t.xs.front()) return t.values.front();
                if (x >= t.xs.back()) return t.values.back();
                const auto hi = static_cast<std::size_t>(std::upper_bound(t.xs.begin(), t.xs.end(), x) - t.xs.begin());
                const std::size_t lo = hi - 1;
                const double w = (x - t.xs[lo]) / (t.xs[hi] - t.xs[lo]);
                return (1.0 - w) * t.values[lo] + w * t.values[hi];
            },
        },
        repr_);
}

std::vector<double> Profile::breakpoints() const {
    std::vector<double> out;
    if (const auto* t = std::get_if<Table>(&repr_)) {
        for (double x : t->xs) {
            if (x > 0.0 && x < 1.0) out.push_back(x);
        }
    }
    return out;
}

bool Profile::is_zero() const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value == 0.0; },
            [](const Mode& m) { return m.amplitude == 0.0; },
            [](const Polynomial& p) { return std::all_of(p.coeffs.begin(), p.coeffs.end(), [](double c) { return c == 0.0; }); },
            [](const Table& t) { return std::all_of(t.values.begin(), t.values.end(), [](double v) { return v == 0.0; }); },
        },
        repr_);
}

}  // namespace heatctrl
