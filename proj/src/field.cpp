#include "quadvortex/field.hpp"

#include "quadvortex/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qv {

double norm(Vec2 v) { return std::hypot(v.x1, v.x2); }

void GridSpec::validate() const {
    if (n < 2) throw std::invalid_argument("grid_n must be at least 2");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("domain_len must be positive and finite");
    if (!(origin.x1 >= 0.0) || !(origin.x2 >= 0.0))
        throw std::invalid_argument("grid origin must lie in the closed first quadrant");
}

QuadrantField::QuadrantField(GridSpec grid) : grid_(grid) {
    grid_.validate();
    values_.assign(static_cast<std::size_t>(grid_.n) * grid_.n, 0.0);
}

QuadrantField::QuadrantField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != static_cast<std::size_t>(grid_.n) * grid_.n)
        throw std::invalid_argument("value count does not match grid_n^2");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]))
            throw FieldError("non-finite value at cell " + std::to_string(k / grid_.n) + "," +
                             std::to_string(k % grid_.n));
    }
}

bool QuadrantField::is_nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

double QuadrantField::max_value() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

FormatError::FormatError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

QuadrantField field_from_fn(const PointFunction& f, const GridSpec& grid) {
    QuadrantField field(grid);
    const int n = grid.n;
    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = 0; j < n; ++j) field.at(i, j) = f(grid.center(i, j));
    });
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(field.at(i, j)))
                throw FieldError("non-finite sample at cell (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
        }
    }
    return field;
}

namespace {

// Row-wise sums of g(value, center) followed by a pairwise tree over rows.
template <class G>
double row_reduce(const QuadrantField& field, G g) {
    const int n = field.n();
    std::vector<double> rows(static_cast<std::size_t>(n));
    parallel_for(0, rows.size(), [&](std::size_t r) {
        const int i = static_cast<int>(r);
        std::vector<double> terms(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) terms[j] = g(field.at(i, j), field.center(i, j));
        rows[r] = pairwise_sum(terms);
    });
    return pairwise_sum(rows);
}

double domain_factor(Domain d) {
    switch (d) {
        case Domain::quadrant: return 1.0;
        case Domain::half_plane: return 2.0;
        case Domain::plane: return 4.0;
    }
    return 1.0;
}

}  // namespace

double integral(const QuadrantField& field) {
    return field.cell_area() * row_reduce(field, [](double v, Vec2) { return v; });
}

double integral_of_square(const QuadrantField& field) {
    return field.cell_area() * row_reduce(field, [](double v, Vec2) { return v * v; });
}

Moments moments(const QuadrantField& field) {
    const double a = field.cell_area();
    Moments m;
    m.mass = a * row_reduce(field, [](double v, Vec2) { return v; });
    m.x1 = a * row_reduce(field, [](double v, Vec2 c) { return c.x1 * v; });
    m.x2 = a * row_reduce(field, [](double v, Vec2 c) { return c.x2 * v; });
    m.impulse_mu = m.x2;
    return m;
}

NormSet norms(const QuadrantField& field, Domain domain) {
    const double a = field.cell_area() * domain_factor(domain);
    NormSet s;
    s.l1 = a * row_reduce(field, [](double v, Vec2) { return std::abs(v); });
    s.l2 = std::sqrt(a * row_reduce(field, [](double v, Vec2) { return v * v; }));
    s.l1_cap_l2 = s.l1 + s.l2;
    s.weighted_l1 =
        a * row_reduce(field, [](double v, Vec2 c) { return std::abs(c.x2) * std::abs(v); });
    s.x_norm = s.weighted_l1 + s.l2;
    return s;
}

std::string format_field(const QuadrantField& field) {
    const GridSpec& g = field.grid();
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "QFIELD v1 %d %.17g", g.n, g.length);
    out += buf;
    if (g.origin.x1 != 0.0 || g.origin.x2 != 0.0) {
        std::snprintf(buf, sizeof buf, " %.17g %.17g", g.origin.x1, g.origin.x2);
        out += buf;
    }
    out += '\n';
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", field.at(i, j));
            if (j) out += ' ';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    return tokens;
}

double parse_double(const std::string& token, int line) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw FormatError(line, "non-numeric token '" + token + "'");
    if (!std::isfinite(v)) throw FormatError(line, "non-finite value '" + token + "'");
    return v;
}

}  // namespace

QuadrantField parse_field(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(1, "missing QFIELD header");
    const auto header = split_ws(line);
    if ((header.size() != 4 && header.size() != 6) || header[0] != "QFIELD" || header[1] != "v1")
        throw FormatError(1, "malformed header, expected 'QFIELD v1 <grid_n> <domain_len>'");
    int n = 0;
    {
        auto [ptr, ec] = std::from_chars(header[2].data(), header[2].data() + header[2].size(), n);
        if (ec != std::errc() || ptr != header[2].data() + header[2].size() || n < 2)
            throw FormatError(1, "malformed header: bad grid_n '" + header[2] + "'");
    }
    GridSpec grid;
    grid.n = n;
    grid.length = parse_double(header[3], 1);
    if (header.size() == 6) grid.origin = {parse_double(header[4], 1), parse_double(header[5], 1)};
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(1, std::string("malformed header: ") + e.what());
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n) * n);
    for (int row = 0; row < n; ++row) {
        const int line_no = row + 2;
        if (!std::getline(in, line))
            throw FormatError(line_no, "expected " + std::to_string(n) + " rows, missing row " +
                                           std::to_string(row));
        const auto tokens = split_ws(line);
        if (static_cast<int>(tokens.size()) != n)
            throw FormatError(line_no, "row " + std::to_string(row) + " has " +
                                           std::to_string(tokens.size()) + " values, expected " +
                                           std::to_string(n));
        for (const auto& t : tokens) values.push_back(parse_double(t, line_no));
    }
    while (std::getline(in, line)) {
        if (!split_ws(line).empty()) throw FormatError(n + 2, "trailing data after last row");
    }
    return QuadrantField(grid, std::move(values));
}

QuadrantField read_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_field(buf.str());
}

void write_field(const QuadrantField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << format_field(field);
}

}  // namespace qv
