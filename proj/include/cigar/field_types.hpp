#pragma once

#include <functional>
#include <map>
#include <string>

#include "charts.hpp"
#include "linalg.hpp"

namespace cigar {

struct ScalarField {
    ChartKind chart = ChartKind::cartesian;
    std::function<double(const ChartPoint&)> eval;

    double operator()(const ChartPoint& p) const { return eval(p); }
};

// Symmetric covariant 2-tensor given componentwise in one chart.
struct SymTensorField {
    ChartKind chart = ChartKind::cartesian;
    std::function<Mat2(const ChartPoint&)> eval;

    Mat2 operator()(const ChartPoint& p) const { return eval(p); }
};

// Vector field as components in a fixed chart, plus the parameters it was
// built from so runs can be reproduced from serialized output.
struct VectorFieldSpec {
    std::string name;
    ChartKind chart = ChartKind::cartesian;
    std::function<Vec2(const ChartPoint&)> components;
    std::map<std::string, double> params;

    Vec2 operator()(const ChartPoint& p) const { return components(p); }
};

} // namespace cigar
