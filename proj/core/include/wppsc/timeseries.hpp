#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wppsc {

/// Uniformly sampled signals; all columns share the time axis.
struct TimeSeries {
    double dt = 0.0;
    std::string meta;
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    /// Set when the run stopped early (divergence or non-finite state).
    std::optional<std::string> aborted;

    std::size_t add_column(const std::string& name) {
        names.push_back(name);
        columns.emplace_back();
        return columns.size() - 1;
    }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (names[k] == name) return k;
        }
        return std::nullopt;
    }

    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return t.size(); }
};

}  // namespace wppsc
