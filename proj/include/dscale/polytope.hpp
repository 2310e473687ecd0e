#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dscale/lp.hpp"

namespace dscale {

/// One linear constraint over the polytope variables.
struct LinearRow {
    std::vector<lp::Term> terms;
    lp::Sense sense = lp::Sense::LE;
    double rhs = 0.0;
    std::string label;

    double activity(std::span<const double> x) const {
        double a = 0.0;
        for (const lp::Term& t : terms) a += t.coeff * x[t.var];
        return a;
    }
    double violation(std::span<const double> x) const {
        double a = activity(x);
        switch (sense) {
            case lp::Sense::LE: return a - rhs;
            case lp::Sense::GE: return rhs - a;
            case lp::Sense::EQ: return a > rhs ? a - rhs : rhs - a;
        }
        return 0.0;
    }
};

struct SeparationResult {
    bool inside = true;
    LinearRow row;           // violated hyperplane when !inside
    double violation = 0.0;  // by how much
};

/// Linear-minimization + separation interface shared by the four application
/// polytopes. Oracles are immutable after construction; queries may run
/// concurrently.
class PolytopeOracle {
public:
    virtual ~PolytopeOracle() = default;

    struct Capabilities {
        bool linear_minimize = false;
        bool separate = false;
        bool list_vertices = false;  // small instances only
    };

    virtual int dimension() const = 0;
    virtual Capabilities capabilities() const = 0;

    /// Constraints loaded into a master LP up front. Everything except the
    /// exponential matroid rank family, which arrives lazily via separate().
    virtual std::vector<LinearRow> initial_rows() const = 0;

    /// Either "inside" (every defining constraint holds within tol) or the
    /// most violated hyperplane.
    virtual SeparationResult separate(std::span<const double> x, double tol) const = 0;

    /// Minimum of cost . x over the integral points; always a 0/1 vertex.
    virtual std::vector<double> linear_minimize(std::span<const double> cost) const = 0;

    /// All integral vertices, up to the enumeration budget.
    virtual std::vector<std::vector<double>> list_vertices(std::size_t budget) const = 0;
};

using PolytopePtr = std::shared_ptr<const PolytopeOracle>;

}  // namespace dscale
