#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gsk/csr_matrix.hpp"
#include "gsk/grid.hpp"

namespace gsk {

// Finite-difference generators for second-order convection-diffusion problems
//
//   -d/dx(a u_x) - d/dy(b u_y) [- d/dz(c u_z)] + convection = F
//
// on the unit square or cube. Diffusion terms use central differences with the
// coefficient sampled at half-grid points; first-order terms use central
// differences. Unknowns are numbered lexicographically, x fastest.

enum class Side { XLow, XHigh, YLow, YHigh, ZLow, ZHigh };
enum class BoundaryType { Dirichlet, Neumann };
enum class ConvectionForm { Advective, Conservative };
enum class EquationScaling { None, GridSquared };
enum class RhsMode { Source, OnesSolution };

/// Dirichlet: u = value, eliminated into the rhs. Neumann: du/dn = value along the
/// outward normal; the boundary nodes of that side become unknowns with the
/// one-sided equation u_b - u_in = h * value (unit coefficients, never rescaled).
struct BoundaryCondition {
    BoundaryType type = BoundaryType::Dirichlet;
    double value = 0.0;
};

using ScalarFn = std::function<double(const Point&)>;

struct CoefficientField {
    std::array<ScalarFn, 3> diffusion;  // a, b, c
    std::array<ScalarFn, 3> convection; // d, e, f; empty means zero
    ScalarFn source;                    // F; empty means zero
    std::array<BoundaryCondition, 6> boundary{};
    ConvectionForm form = ConvectionForm::Advective;
    /// GridSquared multiplies every equation by h^2.
    EquationScaling scaling = EquationScaling::None;
    /// OnesSolution replaces the rhs by A e, e = (1, ..., 1).
    RhsMode rhs = RhsMode::Source;
};

/// Coefficients of d/dx(a u_x) at `node` along `axis`:
/// (-(a+ + a-) u_i + a+ u_{i+1} + a- u_{i-1}) / h^2, a+- = a(node +- h/2).
struct AxisStencil {
    double center;
    double upper;
    double lower;
};

AxisStencil diffusion_stencil(const ScalarFn& a, const Point& node, int axis, double h);

LinearSystem assemble(const CoefficientField& field, const GridSpec& grid, std::string label);

// ---------------------------------------------------------------------------
// Declarative region tables

/// Axis-aligned box; a point is inside when lo < x < hi on every active axis.
struct Box {
    Point lo{0.0, 0.0, 0.0};
    Point hi{1.0, 1.0, 1.0};
    double value = 0.0;
};

/// Background value overridden by boxes; later boxes win.
struct PiecewiseConstant {
    double background = 0.0;
    std::vector<Box> boxes;

    double operator()(const Point& x, int dim) const;
};

/// Small closed family of smooth fields used for convection coefficients.
struct ScalarExpr {
    enum class Kind { Constant, Affine, ExpRadial };

    Kind kind = Kind::Constant;
    /// Constant value, or the offset of the affine form.
    double value = 0.0;
    /// Affine: value + grad . x
    Point grad{0.0, 0.0, 0.0};
    /// ExpRadial: scale * exp(rate * |x|^2)
    double scale = 0.0;
    double rate = 0.0;

    static ScalarExpr constant(double v) { return {Kind::Constant, v, {}, 0.0, 0.0}; }
    static ScalarExpr affine(double v, Point g) { return {Kind::Affine, v, g, 0.0, 0.0}; }
    static ScalarExpr exp_radial(double s, double r) { return {Kind::ExpRadial, 0.0, {}, s, r}; }

    double operator()(const Point& x) const;
    bool is_zero() const { return kind == Kind::Constant && value == 0.0; }
};

struct RegionTable {
    int dim = 2;
    PiecewiseConstant diffusion{1.0, {}};
    PiecewiseConstant source{0.0, {}};
    std::array<ScalarExpr, 3> convection{};
    ConvectionForm form = ConvectionForm::Advective;
    EquationScaling scaling = EquationScaling::None;
    RhsMode rhs = RhsMode::Source;
    std::array<BoundaryCondition, 6> boundary{};

    CoefficientField to_field() const;
    void validate() const;
};

std::string region_table_to_json(const RegionTable& table);
RegionTable region_table_from_json(const std::string& text);
RegionTable read_region_table(const std::filesystem::path& path);
void write_region_table(const RegionTable& table, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// The four benchmark problems

enum class ProblemId { P1, P2, P3, P4 };

std::string to_string(ProblemId id);
ProblemId problem_from_string(const std::string& s);

struct ProblemSpec {
    ProblemId id = ProblemId::P1;
    GridSpec grid = GridSpec::square(128);
    /// Coefficient inside the discontinuity region (P1: a = b; P2, P4: D). Unused by P3.
    double inside = 1e3;
    /// Convection magnitude d = e = f (P4 only).
    double convection = 100.0;
    /// Replace the piecewise coefficient by the inside value everywhere.
    bool continuous = false;

    /// Default parameters for the problem on the given grid.
    static ProblemSpec defaults(ProblemId id, GridSpec grid);
    std::string variant() const;
    void validate() const;
};

/// P1: a = b = inside on (1/4, 3/4)^2 and 1 elsewhere, d = 10(x + y),
/// e = 10(x - y) in conservative form, u = 0 on the boundary, b = A e.
RegionTable p1_table(double inside, bool continuous);
/// P2: D = inside on the inner square and 1 elsewhere, a = b = 200, F = 1,
/// u = 0 on y = 0 and homogeneous Neumann on the other three sides.
RegionTable p2_table(double inside, bool continuous);
/// P3: layered piecewise A(x, y), B(x, y) = 2 exp(2(x^2 + y^2)) on u_x, a
/// localized source, u = 1 on x = 0, x = 1, y = 0 and u = 0 on y = 1. Later
/// boxes override earlier ones.
/// Unlike the other problems, a P3 grid of N counts intervals (N - 1 unknowns
/// per axis), so 128x128 yields 16,129 equations.
RegionTable p3_table();
/// P4: a = inside on (1/3, 2/3)^3 and 1 elsewhere, d = e = f = convection,
/// u = 1 on z = 0 and u = 0 elsewhere.
RegionTable p4_table(double inside, double convection, bool continuous);

RegionTable default_table(const ProblemSpec& spec);

LinearSystem generate_p1(const GridSpec& grid, double inside = 1e3, bool continuous = false);
LinearSystem generate_p2(const GridSpec& grid, double inside = 1e3, bool continuous = false);
LinearSystem generate_p3(const GridSpec& grid);
LinearSystem generate_p4(const GridSpec& grid, double inside = 1e4, double convection = 100.0,
                         bool continuous = false);

/// Generates the problem; `table` replaces the built-in region table when given.
LinearSystem generate(const ProblemSpec& spec, const RegionTable* table = nullptr);

} // namespace gsk
