#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "kcurves/errors.hpp"

namespace kcurves {

/// One point of a learning curve: mean over replicas of an error measure at training size n.
struct CurvePoint {
    double n = 0.0;
    double mean = 0.0;
    double sem = 0.0;  // standard error of the mean, 0 for deterministic curves
    std::size_t replicas = 0;
};

struct LearningCurve {
    std::vector<CurvePoint> points;

    [[nodiscard]] std::vector<double> ns() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.n);
        return out;
    }
    [[nodiscard]] std::vector<double> means() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.mean);
        return out;
    }
};

/// Mean and standard error of a sample.
inline CurvePoint summarize(double n, std::span<const double> values) {
    if (values.empty()) throw SizeError("summarize: no values");
    const auto k = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= k;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sem = values.size() > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
    return {n, mean, sem, values.size()};
}

}  // namespace kcurves
