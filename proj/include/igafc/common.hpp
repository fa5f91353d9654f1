#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace igafc {

/// Execution policy for the data-parallel kernels. `parallel` dispatches to
/// the OpenMP implementation when the library was built with OpenMP support
/// and falls back to the serial reference otherwise. Both paths produce
/// bitwise-identical results for any thread count.
enum class Exec { serial, parallel };

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

/// 2x2 matrix, row-major entries.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double det() const { return a11 * a22 - a12 * a21; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    /// Adjugate (transposed cofactor matrix), so that J * adj(J) = det(J) * I.
    Mat2 adjugate() const { return {a22, -a12, -a21, a11}; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
};

/// Geometry map degenerated (|det J| below threshold) at a parametric point.
class singular_map_error : public std::runtime_error {
public:
    singular_map_error(double xi, double eta, double det)
        : std::runtime_error("geometry map is singular at (xi, eta) = (" + std::to_string(xi) +
                             ", " + std::to_string(eta) + "), det J = " + std::to_string(det)),
          xi_(xi), eta_(eta), det_(det) {}

    double xi() const { return xi_; }
    double eta() const { return eta_; }
    double det() const { return det_; }

private:
    double xi_, eta_, det_;
};

/// Case description file failed validation. Carries every problem found,
/// not just the first.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string s = "invalid case description:";
        for (const auto& p : ps) s += "\n  - " + p;
        return s;
    }
    std::vector<std::string> problems_;
};

} // namespace igafc
