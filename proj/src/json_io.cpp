#include "netmod/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "netmod/errors.hpp"

namespace netmod {

Mat matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw ParseError("matrix JSON needs rows, cols and entries fields");
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    if (rows < 1 || cols < 1) throw ParseError("matrix JSON has non-positive dimensions");
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != static_cast<size_t>(rows) * cols)
        throw ParseError("matrix JSON entries length must be rows*cols");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const auto& e = entries[static_cast<size_t>(i) * cols + k];
            if (!e.is_array() || e.size() != 2)
                throw ParseError("matrix JSON entries must be [re, im] pairs");
            m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    if (!all_finite(m)) throw ParseError("matrix JSON contains non-finite values");
    return m;
}

nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Mat load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("cannot parse " + path + ": " + e.what());
    }
    try {
        return matrix_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_matrix(const std::string& path, const Mat& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write matrix file: " + path);
    out << dump_json(matrix_to_json(m)) << "\n";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void dump_rec(const nlohmann::json& j, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out += pad_in + nlohmann::json(it.key()).dump() + ": ";
                dump_rec(it.value(), indent, depth + 1, out);
                if (i + 1 < j.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // numeric pairs and flat numeric arrays stay on one line
            bool flat = true;
            for (const auto& e : j) flat = flat && (e.is_number() || e.is_boolean());
            if (flat) {
                out += "[";
                for (size_t i = 0; i < j.size(); ++i) {
                    dump_rec(j[i], indent, depth, out);
                    if (i + 1 < j.size()) out += ", ";
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                out += pad_in;
                dump_rec(j[i], indent, depth + 1, out);
                if (i + 1 < j.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    return out;
}

}  // namespace netmod
