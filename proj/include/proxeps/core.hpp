#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace proxeps {

/// Dense double-precision column vector. Iterates, subgradients and
/// flattened images all use this type.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline void require_same_dim(const Vector& x, const Vector& y, const char* where) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
}

/// Euclidean inner product.
inline double inner(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "inner");
    return x.dot(y);
}

/// Euclidean norm.
inline double norm(const Vector& x) { return x.norm(); }

inline bool all_finite(const Vector& x) { return x.allFinite(); }

/// Closed convex feasible set C. Supports the whole space, axis-aligned
/// boxes and Euclidean balls; each admits an exact projection.
class FeasibleSet {
public:
    enum class Kind { WholeSpace, Box, Ball };

    static FeasibleSet whole_space() { return FeasibleSet(Kind::WholeSpace); }

    static FeasibleSet box(Vector lower, Vector upper) {
        require_same_dim(lower, upper, "FeasibleSet::box");
        for (Eigen::Index i = 0; i < lower.size(); ++i)
            if (lower[i] > upper[i])
                throw std::invalid_argument("FeasibleSet::box: lower > upper at component " + std::to_string(i));
        FeasibleSet s(Kind::Box);
        s.lower_ = std::move(lower);
        s.upper_ = std::move(upper);
        return s;
    }

    static FeasibleSet ball(Vector center, double radius) {
        if (!(radius > 0)) throw std::invalid_argument("FeasibleSet::ball: radius must be positive");
        FeasibleSet s(Kind::Ball);
        s.center_ = std::move(center);
        s.radius_ = radius;
        return s;
    }

    Kind kind() const { return kind_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const Vector& center() const { return center_; }
    double radius() const { return radius_; }

    /// Nearest point of the set to z. The whole space returns z unchanged.
    Vector project(const Vector& z) const {
        switch (kind_) {
        case Kind::WholeSpace:
            return z;
        case Kind::Box:
            require_same_dim(lower_, z, "FeasibleSet::project");
            return z.cwiseMax(lower_).cwiseMin(upper_);
        case Kind::Ball: {
            require_same_dim(center_, z, "FeasibleSet::project");
            Vector d = z - center_;
            double n = d.norm();
            if (n <= radius_) return z;
            return center_ + (radius_ / n) * d;
        }
        }
        throw std::logic_error("FeasibleSet::project: unreachable");
    }

    bool contains(const Vector& z, double tol = 1e-12) const {
        return (project(z) - z).norm() <= tol;
    }

private:
    explicit FeasibleSet(Kind k) : kind_(k) {}
    Kind kind_;
    Vector lower_, upper_, center_;
    double radius_ = 0;
};

inline Vector project(const FeasibleSet& C, const Vector& z) { return C.project(z); }

}  // namespace proxeps
