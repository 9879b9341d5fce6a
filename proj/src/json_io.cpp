#include "symbolkit/json_io.hpp"

#include <cmath>
#include <fstream>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"

namespace symbolkit {

namespace {

void write_string(std::string& out, const std::string& s) {
    // Reuse nlohmann's escaping for strings.
    out += Json(s).dump();
}

void write(std::string& out, const Json& j, int indent, int level) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * level), ' ') : "";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += pad;
                write_string(out, it.key());
                out += indent > 0 ? ": " : ":";
                write(out, it.value(), indent, level + 1);
            }
            out += close;
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const Json& v : j) {
                if (!first) out += ',';
                first = false;
                out += pad;
                write(out, v, indent, level + 1);
            }
            out += close;
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                out += format_number(v);
            else
                write_string(out, format_number(v));
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    write(out, j, indent, 0);
    return out;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << dump_json(j) << '\n';
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json to_json(const Mat& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        a.push_back(row);
    }
    return a;
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json number_json(double v) { return Json(v); }

}  // namespace symbolkit
