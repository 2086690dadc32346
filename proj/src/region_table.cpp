#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsk/problems.hpp"

namespace gsk {

using nlohmann::json;

namespace {

constexpr const char* kSideNames[6] = {"x0", "x1", "y0", "y1", "z0", "z1"};
constexpr const char* kAxisNames[3] = {"d", "e", "f"};

json box_to_json(const Box& b, int dim)
{
    json j{{"x0", b.lo[0]}, {"x1", b.hi[0]}, {"y0", b.lo[1]}, {"y1", b.hi[1]}};
    if (dim == 3) {
        j["z0"] = b.lo[2];
        j["z1"] = b.hi[2];
    }
    j["value"] = b.value;
    return j;
}

Box box_from_json(const json& j, int dim)
{
    Box b;
    b.lo = {j.at("x0").get<double>(), j.at("y0").get<double>(), 0.0};
    b.hi = {j.at("x1").get<double>(), j.at("y1").get<double>(), 1.0};
    if (dim == 3) {
        b.lo[2] = j.at("z0").get<double>();
        b.hi[2] = j.at("z1").get<double>();
    }
    b.value = j.at("value").get<double>();
    return b;
}

json piecewise_to_json(const PiecewiseConstant& p, int dim)
{
    json boxes = json::array();
    for (const auto& b : p.boxes) boxes.push_back(box_to_json(b, dim));
    return {{"background", p.background}, {"boxes", boxes}};
}

PiecewiseConstant piecewise_from_json(const json& j, int dim)
{
    PiecewiseConstant p;
    p.background = j.at("background").get<double>();
    if (j.contains("boxes")) {
        for (const auto& b : j.at("boxes")) p.boxes.push_back(box_from_json(b, dim));
    }
    return p;
}

json expr_to_json(const ScalarExpr& e)
{
    switch (e.kind) {
    case ScalarExpr::Kind::Constant: return {{"type", "constant"}, {"value", e.value}};
    case ScalarExpr::Kind::Affine:
        return {{"type", "affine"}, {"value", e.value}, {"x", e.grad[0]}, {"y", e.grad[1]},
                {"z", e.grad[2]}};
    case ScalarExpr::Kind::ExpRadial:
        return {{"type", "exp_radial"}, {"scale", e.scale}, {"rate", e.rate}};
    }
    return {};
}

ScalarExpr expr_from_json(const json& j)
{
    if (j.is_number()) return ScalarExpr::constant(j.get<double>());
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") return ScalarExpr::constant(j.at("value").get<double>());
    if (type == "affine") {
        return ScalarExpr::affine(j.value("value", 0.0),
                                  {j.value("x", 0.0), j.value("y", 0.0), j.value("z", 0.0)});
    }
    if (type == "exp_radial") {
        return ScalarExpr::exp_radial(j.at("scale").get<double>(), j.at("rate").get<double>());
    }
    throw Error("region table: unknown expression type '" + type + "'");
}

} // namespace

std::string region_table_to_json(const RegionTable& t)
{
    json j;
    j["dim"] = t.dim;
    j["diffusion"] = piecewise_to_json(t.diffusion, t.dim);
    j["source"] = piecewise_to_json(t.source, t.dim);
    json conv = json::object();
    for (int ax = 0; ax < t.dim; ++ax) conv[kAxisNames[ax]] = expr_to_json(t.convection[static_cast<std::size_t>(ax)]);
    j["convection"] = conv;
    j["convection_form"] = t.form == ConvectionForm::Conservative ? "conservative" : "advective";
    j["equation_scaling"] = t.scaling == EquationScaling::GridSquared ? "h2" : "none";
    j["rhs"] = t.rhs == RhsMode::OnesSolution ? "ones_solution" : "source";
    json bc = json::array();
    for (int s = 0; s < 2 * t.dim; ++s) {
        const auto& b = t.boundary[static_cast<std::size_t>(s)];
        bc.push_back({{"side", kSideNames[s]},
                      {"type", b.type == BoundaryType::Neumann ? "neumann" : "dirichlet"},
                      {"value", b.value}});
    }
    j["boundary"] = bc;
    return j.dump(2);
}

RegionTable region_table_from_json(const std::string& text)
{
    try {
        const json j = json::parse(text);
        RegionTable t;
        t.dim = j.at("dim").get<int>();
        if (t.dim != 2 && t.dim != 3) throw Error("region table: dim must be 2 or 3");
        t.diffusion = piecewise_from_json(j.at("diffusion"), t.dim);
        if (j.contains("source")) t.source = piecewise_from_json(j.at("source"), t.dim);
        if (j.contains("convection")) {
            for (int ax = 0; ax < 3; ++ax) {
                if (j["convection"].contains(kAxisNames[ax])) {
                    t.convection[static_cast<std::size_t>(ax)] = expr_from_json(j["convection"][kAxisNames[ax]]);
                }
            }
        }
        const auto form = j.value("convection_form", std::string("advective"));
        if (form != "advective" && form != "conservative") {
            throw Error("region table: convection_form must be advective or conservative");
        }
        t.form = form == "conservative" ? ConvectionForm::Conservative : ConvectionForm::Advective;
        const auto scaling = j.value("equation_scaling", std::string("none"));
        if (scaling != "none" && scaling != "h2") {
            throw Error("region table: equation_scaling must be none or h2");
        }
        t.scaling = scaling == "h2" ? EquationScaling::GridSquared : EquationScaling::None;
        const auto rhs = j.value("rhs", std::string("source"));
        if (rhs != "source" && rhs != "ones_solution") {
            throw Error("region table: rhs must be source or ones_solution");
        }
        t.rhs = rhs == "ones_solution" ? RhsMode::OnesSolution : RhsMode::Source;
        if (j.contains("boundary")) {
            for (const auto& b : j.at("boundary")) {
                const auto side = b.at("side").get<std::string>();
                int s = 0;
                while (s < 6 && side != kSideNames[s]) ++s;
                if (s == 6) throw Error("region table: unknown side '" + side + "'");
                const auto type = b.at("type").get<std::string>();
                if (type != "dirichlet" && type != "neumann") {
                    throw Error("region table: boundary type must be dirichlet or neumann");
                }
                t.boundary[static_cast<std::size_t>(s)] = {
                    type == "neumann" ? BoundaryType::Neumann : BoundaryType::Dirichlet,
                    b.value("value", 0.0)};
            }
        }
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw Error(std::string("region table: ") + e.what());
    }
}

RegionTable read_region_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return region_table_from_json(ss.str());
}

void write_region_table(const RegionTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << region_table_to_json(table) << '\n';
}

} // namespace gsk
