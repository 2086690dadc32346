#include "gsk/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gsk {

AxisStencil diffusion_stencil(const ScalarFn& a, const Point& node, int axis, double h)
{
    Point up = node;
    Point down = node;
    up[axis] += 0.5 * h;
    down[axis] -= 0.5 * h;
    const double a_up = a(up);
    const double a_down = a(down);
    const double h2 = h * h;
    return {-(a_up + a_down) / h2, a_up / h2, a_down / h2};
}

namespace {

struct AxisLayout {
    std::size_t first = 0; // first unknown node index on this axis
    std::size_t last = 0;  // last unknown node index (inclusive)
    std::size_t points = 0; // interior points N; nodes run 0..N+1
    double h = 1.0;

    std::size_t count() const { return last - first + 1; }
    bool unknown(std::size_t idx) const { return idx >= first && idx <= last; }
};

const BoundaryCondition& side_bc(const CoefficientField& f, int axis, bool high)
{
    return f.boundary[static_cast<std::size_t>(2 * axis + (high ? 1 : 0))];
}

struct RowBuilder {
    std::vector<std::pair<std::size_t, double>> entries;

    void add(std::size_t col, double v)
    {
        for (auto& e : entries) {
            if (e.first == col) {
                e.second += v;
                return;
            }
        }
        entries.emplace_back(col, v);
    }
};

} // namespace

LinearSystem assemble(const CoefficientField& field, const GridSpec& grid, std::string label)
{
    const int dim = grid.dim;
    if (dim != 2 && dim != 3) throw Error("assemble: grid dimension must be 2 or 3");
    for (int ax = 0; ax < dim; ++ax) {
        if (grid.count(ax) < 1) throw Error("assemble: grid needs at least one point per axis");
        if (!field.diffusion[static_cast<std::size_t>(ax)]) {
            throw Error("assemble: missing diffusion coefficient for axis " + std::to_string(ax));
        }
    }

    std::array<AxisLayout, 3> lay{};
    for (int ax = 0; ax < 3; ++ax) {
        auto& l = lay[static_cast<std::size_t>(ax)];
        if (ax >= dim) continue; // inactive axis: single node at index 0
        l.points = grid.count(ax);
        l.h = grid.spacing(ax);
        l.first = side_bc(field, ax, false).type == BoundaryType::Neumann ? 0 : 1;
        l.last = side_bc(field, ax, true).type == BoundaryType::Neumann ? l.points + 1 : l.points;
    }
    const std::size_t n = lay[0].count() * lay[1].count() * lay[2].count();
    const auto index_of = [&](const std::array<std::size_t, 3>& c) {
        return (c[0] - lay[0].first) +
               lay[0].count() * ((c[1] - lay[1].first) + lay[1].count() * (c[2] - lay[2].first));
    };
    const auto dirichlet_value = [&](const std::array<std::size_t, 3>& c) {
        for (int ax = 0; ax < dim; ++ax) {
            const auto& l = lay[static_cast<std::size_t>(ax)];
            const std::size_t idx = c[static_cast<std::size_t>(ax)];
            if (idx == 0 && side_bc(field, ax, false).type == BoundaryType::Dirichlet) {
                return side_bc(field, ax, false).value;
            }
            if (idx == l.points + 1 && side_bc(field, ax, true).type == BoundaryType::Dirichlet) {
                return side_bc(field, ax, true).value;
            }
        }
        throw Error("assemble: neighbour outside the unknown set is not on a Dirichlet side");
    };

    const double row_scale =
        field.scaling == EquationScaling::GridSquared ? lay[0].h * lay[0].h : 1.0;

    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    Vector rhs(n, 0.0);
    row_ptr.reserve(n + 1);
    cols.reserve(n * (2 * static_cast<std::size_t>(dim) + 1));
    vals.reserve(cols.capacity());

    RowBuilder row;
    std::array<std::size_t, 3> c{};
    for (c[2] = lay[2].first; c[2] <= lay[2].last; ++c[2]) {
        for (c[1] = lay[1].first; c[1] <= lay[1].last; ++c[1]) {
            for (c[0] = lay[0].first; c[0] <= lay[0].last; ++c[0]) {
                const std::size_t me = index_of(c);
                Point x{};
                for (int ax = 0; ax < dim; ++ax) {
                    x[static_cast<std::size_t>(ax)] =
                        static_cast<double>(c[static_cast<std::size_t>(ax)]) *
                        lay[static_cast<std::size_t>(ax)].h;
                }
                row.entries.clear();

                // Nodes on a Neumann side carry the one-sided closure u_b - u_in = h g.
                int closure_axis = -1;
                for (int ax = 0; ax < dim && closure_axis < 0; ++ax) {
                    const auto axu = static_cast<std::size_t>(ax);
                    if (c[axu] == 0 || c[axu] == lay[axu].points + 1) closure_axis = ax;
                }
                if (closure_axis >= 0) {
                    const auto axu = static_cast<std::size_t>(closure_axis);
                    const bool high = c[axu] != 0;
                    auto in = c;
                    in[axu] = high ? lay[axu].points : 1;
                    row.add(me, 1.0);
                    row.add(index_of(in), -1.0);
                    std::sort(row.entries.begin(), row.entries.end());
                    for (const auto& [col, v] : row.entries) {
                        cols.push_back(col);
                        vals.push_back(v);
                    }
                    row_ptr.push_back(cols.size());
                    rhs[me] = lay[axu].h * side_bc(field, closure_axis, high).value;
                    continue;
                }

                row.add(me, 0.0);
                double b = field.source ? field.source(x) : 0.0;

                for (int ax = 0; ax < dim; ++ax) {
                    const auto axu = static_cast<std::size_t>(ax);
                    const auto& l = lay[axu];
                    const double h = l.h;
                    const std::size_t idx = c[axu];

                    Point up = x, down = x;
                    up[axu] += 0.5 * h;
                    down[axu] -= 0.5 * h;
                    const double a_up = field.diffusion[axu](up);
                    const double a_down = field.diffusion[axu](down);

                    const double h2 = h * h;
                    double c_up = -a_up / h2;
                    double c_down = -a_down / h2;
                    row.add(me, (a_up + a_down) / h2);

                    if (const auto& conv = field.convection[axu]) {
                        if (field.form == ConvectionForm::Advective) {
                            const double v = conv(x) / (2.0 * h);
                            c_up += v;
                            c_down -= v;
                        } else {
                            Point xu = x, xd = x;
                            xu[axu] += h;
                            xd[axu] -= h;
                            c_up += conv(xu) / (2.0 * h);
                            c_down -= conv(xd) / (2.0 * h);
                        }
                    }

                    const auto couple = [&](bool upper, double coef) {
                        auto nb = c;
                        nb[axu] = upper ? idx + 1 : idx - 1;
                        if (l.unknown(nb[axu])) {
                            row.add(index_of(nb), coef);
                        } else {
                            b -= coef * dirichlet_value(nb);
                        }
                    };
                    couple(false, c_down);
                    couple(true, c_up);
                }

                std::sort(row.entries.begin(), row.entries.end());
                for (const auto& [col, v] : row.entries) {
                    if (v == 0.0 && col != me) continue;
                    cols.push_back(col);
                    vals.push_back(v * row_scale);
                }
                row_ptr.push_back(cols.size());
                rhs[me] = b * row_scale;
            }
        }
    }

    LinearSystem sys;
    sys.matrix = CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
    sys.rhs = field.rhs == RhsMode::OnesSolution ? spmv(sys.matrix, ones(n)) : std::move(rhs);
    sys.label = std::move(label);
    sys.grid = grid;
    return sys;
}

// ---------------------------------------------------------------------------

double PiecewiseConstant::operator()(const Point& x, int dim) const
{
    double v = background;
    for (const auto& b : boxes) {
        bool inside = true;
        for (int ax = 0; ax < dim && inside; ++ax) {
            const auto a = static_cast<std::size_t>(ax);
            inside = b.lo[a] < x[a] && x[a] < b.hi[a];
        }
        if (inside) v = b.value;
    }
    return v;
}

double ScalarExpr::operator()(const Point& x) const
{
    switch (kind) {
    case Kind::Constant: return value;
    case Kind::Affine: return value + grad[0] * x[0] + grad[1] * x[1] + grad[2] * x[2];
    case Kind::ExpRadial: return scale * std::exp(rate * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    }
    return 0.0;
}

void RegionTable::validate() const
{
    if (dim != 2 && dim != 3) throw Error("region table: dim must be 2 or 3");
    if (!(diffusion.background > 0.0)) throw Error("region table: diffusion must be positive");
    for (const auto& b : diffusion.boxes) {
        if (!(b.value > 0.0)) throw Error("region table: diffusion must be positive");
    }
    for (int ax = dim; ax < 3; ++ax) {
        if (!convection[static_cast<std::size_t>(ax)].is_zero()) {
            throw Error("region table: convection set on an axis beyond dim");
        }
    }
}

CoefficientField RegionTable::to_field() const
{
    validate();
    CoefficientField f;
    const int d = dim;
    const auto diff = diffusion;
    for (std::size_t ax = 0; ax < 3; ++ax) {
        f.diffusion[ax] = [diff, d](const Point& x) { return diff(x, d); };
        if (!convection[ax].is_zero()) {
            const auto expr = convection[ax];
            f.convection[ax] = [expr](const Point& x) { return expr(x); };
        }
    }
    if (source.background != 0.0 || !source.boxes.empty()) {
        const auto src = source;
        f.source = [src, d](const Point& x) { return src(x, d); };
    }
    f.boundary = boundary;
    f.form = form;
    f.scaling = scaling;
    f.rhs = rhs;
    return f;
}

// ---------------------------------------------------------------------------

std::string to_string(ProblemId id)
{
    switch (id) {
    case ProblemId::P1: return "P1";
    case ProblemId::P2: return "P2";
    case ProblemId::P3: return "P3";
    case ProblemId::P4: return "P4";
    }
    return "?";
}

ProblemId problem_from_string(const std::string& s)
{
    if (s == "P1" || s == "p1") return ProblemId::P1;
    if (s == "P2" || s == "p2") return ProblemId::P2;
    if (s == "P3" || s == "p3") return ProblemId::P3;
    if (s == "P4" || s == "p4") return ProblemId::P4;
    throw Error("unknown problem '" + s + "' (expected P1..P4)");
}

ProblemSpec ProblemSpec::defaults(ProblemId id, GridSpec grid)
{
    ProblemSpec s;
    s.id = id;
    s.grid = grid;
    switch (id) {
    case ProblemId::P1: s.inside = 1e3; break;
    case ProblemId::P2: s.inside = 1e3; s.convection = 200.0; break;
    case ProblemId::P3: s.inside = 0.0; s.convection = 0.0; break;
    case ProblemId::P4: s.inside = 1e4; s.convection = 100.0; break;
    }
    return s;
}

std::string ProblemSpec::variant() const
{
    char buf[128];
    switch (id) {
    case ProblemId::P1:
    case ProblemId::P2:
        std::snprintf(buf, sizeof buf, "inside=%g%s", inside, continuous ? " continuous" : "");
        break;
    case ProblemId::P3: std::snprintf(buf, sizeof buf, "default"); break;
    case ProblemId::P4:
        std::snprintf(buf, sizeof buf, "inside=%g conv=%g%s", inside, convection,
                      continuous ? " continuous" : "");
        break;
    }
    return std::string(buf) + " grid=" + grid.to_string();
}

void ProblemSpec::validate() const
{
    const int want_dim = id == ProblemId::P4 ? 3 : 2;
    if (grid.dim != want_dim) {
        throw Error(to_string(id) + " needs a " + std::to_string(want_dim) + "D grid");
    }
    if (grid.nx < 1 || grid.ny < 1 || (grid.dim == 3 && grid.nz < 1)) {
        throw Error("grid needs at least one point per axis");
    }
    if (id == ProblemId::P3 && (grid.nx < 2 || grid.ny < 2)) {
        throw Error("P3 grid counts intervals and needs at least 2 per axis");
    }
    if (id != ProblemId::P3 && !(inside > 0.0)) throw Error("inside value must be > 0");
    if (!(convection >= 0.0)) throw Error("convection must be >= 0");
}

namespace {

std::array<BoundaryCondition, 6> all_dirichlet(double v = 0.0)
{
    std::array<BoundaryCondition, 6> bc{};
    for (auto& b : bc) b = {BoundaryType::Dirichlet, v};
    return bc;
}

std::size_t side_index(Side s) { return static_cast<std::size_t>(s); }

} // namespace

RegionTable p1_table(double inside, bool continuous)
{
    RegionTable t;
    t.dim = 2;
    if (continuous) {
        t.diffusion = {inside, {}};
    } else {
        t.diffusion = {1.0, {Box{{0.25, 0.25, 0.0}, {0.75, 0.75, 1.0}, inside}}};
    }
    t.convection[0] = ScalarExpr::affine(0.0, {10.0, 10.0, 0.0});
    t.convection[1] = ScalarExpr::affine(0.0, {10.0, -10.0, 0.0});
    t.form = ConvectionForm::Conservative;
    t.scaling = EquationScaling::GridSquared;
    t.rhs = RhsMode::OnesSolution;
    t.boundary = all_dirichlet();
    return t;
}

RegionTable p2_table(double inside, bool continuous)
{
    RegionTable t;
    t.dim = 2;
    if (continuous) {
        t.diffusion = {inside, {}};
    } else {
        t.diffusion = {1.0, {Box{{0.2, 0.2, 0.0}, {0.8, 0.8, 1.0}, inside}}};
    }
    t.source = {1.0, {}};
    t.convection[0] = ScalarExpr::constant(200.0);
    t.convection[1] = ScalarExpr::constant(200.0);
    t.form = ConvectionForm::Advective;
    t.scaling = EquationScaling::None;
    t.rhs = RhsMode::Source;
    t.boundary = all_dirichlet();
    t.boundary[side_index(Side::XLow)] = {BoundaryType::Neumann, 0.0};
    t.boundary[side_index(Side::XHigh)] = {BoundaryType::Neumann, 0.0};
    t.boundary[side_index(Side::YHigh)] = {BoundaryType::Neumann, 0.0};
    return t;
}

RegionTable p3_table()
{
    RegionTable t;
    t.dim = 2;
    t.diffusion = {1.0,
                   {
                       Box{{0.7, 0.05, 0.0}, {0.95, 0.6, 1.0}, 1e4},
                       Box{{0.6, 0.25, 0.0}, {0.95, 0.6, 1.0}, 1e-5},
                       Box{{0.1, 0.65, 0.0}, {0.3, 0.95, 1.0}, 1e2},
                   }};
    t.source = {0.0, {Box{{0.3, 0.6, 0.0}, {0.35, 0.65, 1.0}, 100.0}}};
    t.convection[0] = ScalarExpr::exp_radial(2.0, 2.0);
    t.form = ConvectionForm::Advective;
    t.scaling = EquationScaling::GridSquared;
    t.rhs = RhsMode::Source;
    t.boundary = all_dirichlet();
    t.boundary[side_index(Side::XLow)] = {BoundaryType::Dirichlet, 1.0};
    t.boundary[side_index(Side::XHigh)] = {BoundaryType::Dirichlet, 1.0};
    t.boundary[side_index(Side::YLow)] = {BoundaryType::Dirichlet, 1.0};
    return t;
}

RegionTable p4_table(double inside, double convection, bool continuous)
{
    RegionTable t;
    t.dim = 3;
    if (continuous) {
        t.diffusion = {inside, {}};
    } else {
        const double lo = 1.0 / 3.0, hi = 2.0 / 3.0;
        t.diffusion = {1.0, {Box{{lo, lo, lo}, {hi, hi, hi}, inside}}};
    }
    for (auto& c : t.convection) c = ScalarExpr::constant(convection);
    t.form = ConvectionForm::Advective;
    t.scaling = EquationScaling::GridSquared;
    t.rhs = RhsMode::Source;
    t.boundary = all_dirichlet();
    t.boundary[side_index(Side::ZLow)] = {BoundaryType::Dirichlet, 1.0};
    return t;
}

RegionTable default_table(const ProblemSpec& spec)
{
    switch (spec.id) {
    case ProblemId::P1: return p1_table(spec.inside, spec.continuous);
    case ProblemId::P2: return p2_table(spec.inside, spec.continuous);
    case ProblemId::P3: return p3_table();
    case ProblemId::P4: return p4_table(spec.inside, spec.convection, spec.continuous);
    }
    throw Error("unknown problem");
}

LinearSystem generate(const ProblemSpec& spec, const RegionTable* table)
{
    spec.validate();
    const RegionTable t = table ? *table : default_table(spec);
    if (t.dim != spec.grid.dim) throw Error("region table dimension does not match the grid");
    GridSpec grid = spec.grid;
    if (spec.id == ProblemId::P3) {
        // P3 grids count intervals: 128x128 gives 127^2 unknowns.
        grid.nx -= 1;
        grid.ny -= 1;
    }
    return assemble(t.to_field(), grid, to_string(spec.id) + " " + spec.variant());
}

LinearSystem generate_p1(const GridSpec& grid, double inside, bool continuous)
{
    ProblemSpec s = ProblemSpec::defaults(ProblemId::P1, grid);
    s.inside = inside;
    s.continuous = continuous;
    return generate(s);
}

LinearSystem generate_p2(const GridSpec& grid, double inside, bool continuous)
{
    ProblemSpec s = ProblemSpec::defaults(ProblemId::P2, grid);
    s.inside = inside;
    s.continuous = continuous;
    return generate(s);
}

LinearSystem generate_p3(const GridSpec& grid)
{
    return generate(ProblemSpec::defaults(ProblemId::P3, grid));
}

LinearSystem generate_p4(const GridSpec& grid, double inside, double convection, bool continuous)
{
    ProblemSpec s = ProblemSpec::defaults(ProblemId::P4, grid);
    s.inside = inside;
    s.convection = convection;
    s.continuous = continuous;
    return generate(s);
}

} // namespace gsk
