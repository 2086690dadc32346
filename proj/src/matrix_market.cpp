#include "gsk/matrix_market.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gsk {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    bool next(std::string& line)
    {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        return false;
    }

    // Skips comment and blank lines.
    bool next_data(std::string& line)
    {
        while (next(line)) {
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }
};

void check_header(LineReader& reader, const std::string& layout)
{
    std::string line;
    if (!reader.next(line)) throw ParseError("empty file", 1);
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
        throw ParseError("missing %%MatrixMarket matrix banner", reader.line_no);
    }
    if (lower(format) != layout) {
        throw ParseError("expected '" + layout + "' format, got '" + format + "'", reader.line_no);
    }
    if (lower(field) != "real" || lower(symmetry) != "general") {
        throw ParseError("only 'real general' is supported", reader.line_no);
    }
}

template <typename T>
const char* parse_token(const char* p, const char* end, T& value)
{
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    const auto [ptr, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || ptr == p) return nullptr;
    return ptr;
}

bool only_space(const char* p, const char* end)
{
    for (; p < end; ++p) {
        if (*p != ' ' && *p != '\t') return false;
    }
    return true;
}

void write_double(std::ostream& out, double v)
{
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.write(buf, len);
}

} // namespace

CsrMatrix read_mm_matrix(std::istream& in)
{
    LineReader reader{in};
    check_header(reader, "coordinate");

    std::string line;
    if (!reader.next_data(line)) throw ParseError("missing size line", reader.line_no + 1);
    std::size_t rows = 0, cols = 0, nnz = 0;
    {
        const char* p = line.data();
        const char* end = p + line.size();
        if (!(p = parse_token(p, end, rows)) || !(p = parse_token(p, end, cols)) ||
            !(p = parse_token(p, end, nnz)) || !only_space(p, end)) {
            throw ParseError("malformed size line", reader.line_no);
        }
    }
    if (rows != cols) {
        throw ParseError("matrix is not square (" + std::to_string(rows) + " x " +
                             std::to_string(cols) + ")",
                         reader.line_no);
    }

    struct Entry {
        Triplet t;
        std::size_t line;
    };
    std::vector<Entry> entries;
    entries.reserve(nnz);
    while (entries.size() < nnz) {
        if (!reader.next_data(line)) {
            throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                                 std::to_string(entries.size()),
                             reader.line_no + 1);
        }
        std::size_t i = 0, j = 0;
        double v = 0.0;
        const char* p = line.data();
        const char* end = p + line.size();
        if (!(p = parse_token(p, end, i)) || !(p = parse_token(p, end, j)) ||
            !(p = parse_token(p, end, v)) || !only_space(p, end)) {
            throw ParseError("malformed entry", reader.line_no);
        }
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") out of range",
                             reader.line_no);
        }
        entries.push_back({{i - 1, j - 1, v}, reader.line_no});
    }
    if (reader.next_data(line)) throw ParseError("trailing data after last entry", reader.line_no);

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.t.row != b.t.row ? a.t.row < b.t.row : a.t.col < b.t.col;
    });
    std::vector<Triplet> triplets;
    triplets.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (k > 0 && entries[k].t.row == entries[k - 1].t.row &&
            entries[k].t.col == entries[k - 1].t.col) {
            throw ParseError("duplicate entry (" + std::to_string(entries[k].t.row + 1) + ", " +
                                 std::to_string(entries[k].t.col + 1) + ")",
                             std::max(entries[k].line, entries[k - 1].line));
        }
        triplets.push_back(entries[k].t);
    }
    return CsrMatrix::from_triplets(rows, std::move(triplets));
}

Vector read_mm_array(std::istream& in)
{
    LineReader reader{in};
    check_header(reader, "array");
    std::string line;
    if (!reader.next_data(line)) throw ParseError("missing size line", reader.line_no + 1);
    std::size_t rows = 0, cols = 0;
    {
        const char* p = line.data();
        const char* end = p + line.size();
        if (!(p = parse_token(p, end, rows)) || !(p = parse_token(p, end, cols)) ||
            !only_space(p, end)) {
            throw ParseError("malformed size line", reader.line_no);
        }
    }
    if (cols != 1) throw ParseError("rhs array must have exactly one column", reader.line_no);
    Vector v;
    v.reserve(rows);
    while (v.size() < rows) {
        if (!reader.next_data(line)) {
            throw ParseError("expected " + std::to_string(rows) + " values", reader.line_no + 1);
        }
        double x = 0.0;
        const char* p = line.data();
        const char* end = p + line.size();
        if (!(p = parse_token(p, end, x)) || !only_space(p, end)) {
            throw ParseError("malformed value", reader.line_no);
        }
        v.push_back(x);
    }
    if (reader.next_data(line)) throw ParseError("trailing data after last value", reader.line_no);
    return v;
}

void write_mm_matrix(std::ostream& out, const CsrMatrix& a)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto r = a.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            out << i + 1 << ' ' << r.cols[k] + 1 << ' ';
            write_double(out, r.vals[k]);
            out << '\n';
        }
    }
}

void write_mm_array(std::ostream& out, std::span<const double> v)
{
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    for (double x : v) {
        write_double(out, x);
        out << '\n';
    }
}

std::filesystem::path rhs_companion(const std::filesystem::path& matrix_path)
{
    auto p = matrix_path;
    p.replace_filename(matrix_path.stem().string() + "_rhs.mtx");
    return p;
}

namespace {

std::pair<std::filesystem::path, std::filesystem::path> layout(const std::filesystem::path& path)
{
    namespace fs = std::filesystem;
    if (fs::is_directory(path) || path.extension() != ".mtx") {
        return {path / "matrix.mtx", path / "rhs.mtx"};
    }
    return {path, rhs_companion(path)};
}

template <typename Fn>
auto with_input(const std::filesystem::path& p, Fn&& fn)
{
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    try {
        return fn(in);
    } catch (const ParseError& e) {
        throw ParseError(p.string() + ": " + e.what(), e.line());
    }
}

} // namespace

LinearSystem read_matrix_market(const std::filesystem::path& path)
{
    const auto [mpath, rpath] = layout(path);
    LinearSystem sys;
    sys.matrix = with_input(mpath, [](std::istream& in) { return read_mm_matrix(in); });
    sys.rhs = with_input(rpath, [](std::istream& in) { return read_mm_array(in); });
    sys.label = path.string();
    if (sys.rhs.size() != sys.matrix.size()) {
        throw DimensionError("rhs length " + std::to_string(sys.rhs.size()) +
                             " does not match matrix order " + std::to_string(sys.matrix.size()));
    }
    return sys;
}

void write_matrix_market(const LinearSystem& system, const std::filesystem::path& path)
{
    namespace fs = std::filesystem;
    const auto [mpath, rpath] = layout(path);
    if (mpath.has_parent_path()) fs::create_directories(mpath.parent_path());
    std::ofstream m(mpath);
    std::ofstream r(rpath);
    if (!m || !r) throw Error("cannot write to " + path.string());
    write_mm_matrix(m, system.matrix);
    write_mm_array(r, system.rhs);
    if (!m || !r) throw Error("write failed for " + path.string());
}

} // namespace gsk
