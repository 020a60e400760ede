#include "hessianlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hessianlab::io {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string field_csv(const BallGrid& g, std::span<const double> values) {
    std::ostringstream out;
    out << "index";
    for (int j = 1; j <= g.complex_dim(); ++j) out << ",x" << j << ",y" << j;
    out << ",value\n";
    for (int i = 0; i < g.num_interior(); ++i) {
        out << i;
        for (double c : g.point(i)) out << ',' << fmt(c);
        out << ',' << fmt(values[i]) << '\n';
    }
    return out.str();
}

void write_field_csv(const std::string& path, const BallGrid& g, std::span<const double> values) {
    write_text(path, field_csv(g, values));
}

void write_pgm_slice(const std::string& path, const BallGrid& g, std::span<const double> values,
                     int axis_u, int axis_v) {
    const int D = g.real_dim();
    if (axis_u < 0 || axis_v < 0 || axis_u >= D || axis_v >= D || axis_u == axis_v)
        throw ArgumentError("write_pgm_slice: bad slice axes");
    const int imax = g.denominator() - 1;
    const int side = 2 * imax + 1;

    std::vector<int> present(static_cast<size_t>(side) * side, -1);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    std::vector<int> c(D, 0);
    for (int iu = -imax; iu <= imax; ++iu)
        for (int iv = -imax; iv <= imax; ++iv) {
            std::fill(c.begin(), c.end(), 0);
            c[axis_u] = iu;
            c[axis_v] = iv;
            const int idx = g.index_at(c);
            present[(iu + imax) * side + (iv + imax)] = idx;
            if (idx >= 0) {
                if (first || values[idx] < lo) lo = values[idx];
                if (first || values[idx] > hi) hi = values[idx];
                first = false;
            }
        }

    std::string data;
    data.reserve(static_cast<size_t>(side) * side);
    const double span = (hi > lo) ? (hi - lo) : 1.0;
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col) {
            const int idx = present[row * side + col];
            unsigned char px = 0;
            if (idx >= 0)
                px = static_cast<unsigned char>(255.0 * (values[idx] - lo) / span + 0.5);
            data.push_back(static_cast<char>(px));
        }

    std::ostringstream hdr;
    hdr << "P5\n" << side << ' ' << side << "\n255\n";
    write_text(path, hdr.str() + data);

    nlohmann::json meta;
    meta["min"] = lo;
    meta["max"] = hi;
    meta["width"] = side;
    meta["height"] = side;
    meta["axis_u"] = axis_u;
    meta["axis_v"] = axis_v;
    meta["scaling"] = "linear min-max, row-major";
    write_text(path + ".json", meta.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace hessianlab::io
