#include "mre/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mre::io {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_vtk_header(std::ostream& os, const Grid& g, std::int64_t npoints) {
    os << "# vtk DataFile Version 3.0\n";
    os << "field\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nodes(0) << ' ' << g.nodes(1) << ' ' << (g.dim == 3 ? g.nodes(2) : 1)
       << "\n";
    os << "ORIGIN 0 0 0\n";
    os << "SPACING " << fmt(g.h[0]) << ' ' << fmt(g.h[1]) << ' ' << fmt(g.dim == 3 ? g.h[2] : 1.0)
       << "\n";
    os << "POINT_DATA " << npoints << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

struct VtkHead {
    Grid grid;
    std::string kind;  // SCALARS or VECTORS
    std::string name;
};

VtkHead read_vtk_head(std::istream& is, const std::string& path) {
    std::string line;
    int nx = 0, ny = 0, nz = 0;
    double hx = 1, hy = 1, hz = 1;
    VtkHead head;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "DIMENSIONS") {
            ls >> nx >> ny >> nz;
        } else if (tok == "SPACING") {
            ls >> hx >> hy >> hz;
        } else if (tok == "SCALARS" || tok == "VECTORS") {
            head.kind = tok;
            ls >> head.name;
            if (tok == "SCALARS") std::getline(is, line);  // LOOKUP_TABLE
            break;
        }
    }
    if (nx < 2 || ny < 2) throw IoError("not a structured-points field file: " + path);
    int dim = nz > 1 ? 3 : 2;
    Index3 cells = {nx - 1, ny - 1, dim == 3 ? nz - 1 : 1};
    std::array<double, 3> extent = {hx * (nx - 1), hy * (ny - 1), dim == 3 ? hz * (nz - 1) : 1.0};
    head.grid = Grid::make(dim, cells, extent);
    if (head.kind.empty()) throw IoError("no field data in " + path);
    return head;
}

}  // namespace

void write_vtk(const std::string& path, const std::string& name, const ScalarField& f) {
    auto os = open_out(path);
    write_vtk_header(os, f.grid, f.grid.num_nodes());
    os << "SCALARS " << name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (double v : f.values) os << fmt(v) << "\n";
    if (!os) throw IoError("write failed: " + path);
}

void write_vtk(const std::string& path, const std::string& name, const VectorField& f) {
    auto os = open_out(path);
    const Grid& g = f.grid;
    const std::int64_t n = g.num_nodes();
    write_vtk_header(os, g, n);
    os << "VECTORS " << name << " double\n";
    for (std::int64_t i = 0; i < n; ++i) {
        os << fmt(f.at(0, i)) << ' ' << fmt(f.at(1, i)) << ' '
           << fmt(g.dim == 3 ? f.at(2, i) : 0.0) << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

FieldVariant read_vtk(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    VtkHead head = read_vtk_head(is, path);
    const std::int64_t n = head.grid.num_nodes();
    if (head.kind == "SCALARS") {
        ScalarField f(head.grid);
        for (std::int64_t i = 0; i < n; ++i)
            if (!(is >> f.values[std::size_t(i)])) throw IoError("truncated field data: " + path);
        return f;
    }
    VectorField f(head.grid);
    for (std::int64_t i = 0; i < n; ++i) {
        double x, y, z;
        if (!(is >> x >> y >> z)) throw IoError("truncated field data: " + path);
        f.at(0, i) = x;
        f.at(1, i) = y;
        if (head.grid.dim == 3) f.at(2, i) = z;
    }
    return f;
}

ScalarField read_vtk_scalar(const std::string& path) {
    auto v = read_vtk(path);
    if (auto* f = std::get_if<ScalarField>(&v)) return *f;
    throw IoError("expected a scalar field in " + path);
}

VectorField read_vtk_vector(const std::string& path) {
    auto v = read_vtk(path);
    if (auto* f = std::get_if<VectorField>(&v)) return *f;
    throw IoError("expected a vector field in " + path);
}

void write_csv(const std::string& path, const ScalarField& f) {
    auto os = open_out(path);
    const Grid& g = f.grid;
    os << "id,x,y";
    if (g.dim == 3) os << ",z";
    os << ",value\n";
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        auto x = g.coords(ix);
        os << id << ',' << fmt(x[0]) << ',' << fmt(x[1]);
        if (g.dim == 3) os << ',' << fmt(x[2]);
        os << ',' << fmt(f.values[std::size_t(id)]) << "\n";
    });
    if (!os) throw IoError("write failed: " + path);
}

void write_csv(const std::string& path, const VectorField& f) {
    auto os = open_out(path);
    const Grid& g = f.grid;
    os << "id,x,y";
    if (g.dim == 3) os << ",z";
    for (int c = 0; c < g.dim; ++c) os << ",u" << c;
    os << "\n";
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        auto x = g.coords(ix);
        os << id << ',' << fmt(x[0]) << ',' << fmt(x[1]);
        if (g.dim == 3) os << ',' << fmt(x[2]);
        for (int c = 0; c < g.dim; ++c) os << ',' << fmt(f.at(c, id));
        os << "\n";
    });
    if (!os) throw IoError("write failed: " + path);
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    auto os = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw IoError("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(lineno));
        if (cfg.values_.count(key)) throw ConfigError("duplicate config key: " + key);
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
}

void Config::restrict_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.count(k)) throw ConfigError("unknown config key: " + k);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + v);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + v);
    }
}

long Config::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

}  // namespace mre::io
