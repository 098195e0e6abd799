#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    friend bool operator==(Vec2, Vec2) = default;
};

double norm(Vec2 v);

// Square cell-centered window [o1, o1+L] x [o2, o2+L] inside the closed
// first quadrant. The default origin is the quadrant corner.
struct GridSpec {
    int n = 0;
    double length = 0.0;
    Vec2 origin{};

    double h() const { return length / n; }
    // Row i runs along x2, column j along x1.
    Vec2 center(int i, int j) const {
        return {origin.x1 + (j + 0.5) * h(), origin.x2 + (i + 0.5) * h()};
    }
    void validate() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// rho = omega * 1_Q sampled at cell centers; the odd-odd extension to the
// plane is implied and never stored.
class QuadrantField {
public:
    QuadrantField() = default;
    explicit QuadrantField(GridSpec grid);
    QuadrantField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    int n() const { return grid_.n; }
    double h() const { return grid_.h(); }
    double cell_area() const { return grid_.h() * grid_.h(); }
    Vec2 center(int i, int j) const { return grid_.center(i, j); }

    double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * grid_.n + j]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n + j]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool is_nonnegative() const;
    double max_value() const;

private:
    GridSpec grid_{};
    std::vector<double> values_;
};

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Format errors carry the 1-based line number of the offending input line.
class FormatError : public std::runtime_error {
public:
    FormatError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

struct Moments {
    double mass = 0.0;
    double x1 = 0.0;          // int x1 rho
    double x2 = 0.0;          // int x2 rho
    double impulse_mu = 0.0;  // int_Q x2 rho (same integral as x2)
};

// Which domain an integral is reported over. Quadrant integrals of the
// odd-odd extension are multiplied by 2 (half plane) or 4 (plane).
enum class Domain { quadrant, half_plane, plane };

struct NormSet {
    double l1 = 0.0;
    double l2 = 0.0;
    double l1_cap_l2 = 0.0;
    double weighted_l1 = 0.0;  // int |x2| |omega|
    double x_norm = 0.0;       // weighted_l1 + l2
};

using PointFunction = std::function<double(Vec2)>;

QuadrantField field_from_fn(const PointFunction& f, const GridSpec& grid);
Moments moments(const QuadrantField& field);
NormSet norms(const QuadrantField& field, Domain domain = Domain::quadrant);

// Plain midpoint integral of values (L1 when nonnegative) and of squares.
double integral(const QuadrantField& field);
double integral_of_square(const QuadrantField& field);

QuadrantField read_field(const std::filesystem::path& path);
void write_field(const QuadrantField& field, const std::filesystem::path& path);
QuadrantField parse_field(const std::string& text);
std::string format_field(const QuadrantField& field);

}  // namespace qv
