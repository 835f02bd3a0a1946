#include "flowlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit(const json& j, std::string& out, int indent, int depth) {
    auto pad = [&](int d) {
        if (indent > 0) out.append(static_cast<size_t>(d) * indent, ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",";
                first = false;
                if (indent > 0) out += "\n";
                pad(depth + 1);
                out += json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                emit(it.value(), out, indent, depth + 1);
            }
            if (indent > 0) out += "\n";
            pad(depth);
            out += "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",";
                first = false;
                if (indent > 0) out += "\n";
                pad(depth + 1);
                emit(v, out, indent, depth + 1);
            }
            if (indent > 0) out += "\n";
            pad(depth);
            out += "]";
            return;
        }
        case json::value_t::number_float:
            out += fmt17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string emit_json(const json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    out += "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string digest_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("cannot open for writing: " + path);
    os << content;
    if (!os) throw IoFailure("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

namespace {

json permutation_to_json(const Permutation& p) {
    std::istringstream rows(p.to_text());
    std::string top, bottom;
    std::getline(rows, top);
    std::getline(rows, bottom);
    return json{{"top", top}, {"bottom", bottom}};
}

Permutation permutation_from_json(const json& j) {
    return Permutation::parse(j.at("top").get<std::string>(),
                              j.at("bottom").get<std::string>());
}

}  // namespace

json iet_to_json(const Iet& iet) {
    return json{{"permutation", permutation_to_json(iet.permutation())},
                {"lengths", iet.lengths()},
                {"log_scale", iet.log_scale()}};
}

Iet iet_from_json(const json& j) {
    return Iet(permutation_from_json(j.at("permutation")),
               j.at("lengths").get<std::vector<double>>(), j.at("log_scale").get<double>());
}

json surface_to_json(const ZipperedRectangles& s) {
    return json{{"permutation", permutation_to_json(s.permutation())},
                {"lengths", s.lengths()},
                {"tau", s.tau().tau},
                {"heights", s.heights()},
                {"area", s.area()}};
}

ZipperedRectangles surface_from_json(const json& j) {
    Iet iet(permutation_from_json(j.at("permutation")),
            j.at("lengths").get<std::vector<double>>());
    SuspensionDatum tau{j.at("tau").get<std::vector<double>>()};
    ZipperedRectangles s(std::move(iet), std::move(tau));
    // heights/area fields are derived; cross-check when present
    if (j.contains("area")) {
        double a = j.at("area").get<double>();
        if (std::abs(a - s.area()) > 1e-9 * std::max(1.0, a))
            throw ConfigInvalid("surface area field inconsistent with tau");
    }
    return s;
}

json observable_to_json(const CellwiseObservable& f) {
    json arr = json::array();
    for (int j = 0; j < f.cells(); ++j)
        for (const auto& t : f.terms(j))
            arr.push_back(json{{"cell", j},
                               {"m", t.m},
                               {"n", t.n},
                               {"re", t.c.real()},
                               {"im", t.c.imag()}});
    return arr;
}

CellwiseObservable observable_from_json(const json& j) {
    int cells = 0;
    for (const auto& e : j) cells = std::max(cells, e.at("cell").get<int>() + 1);
    CellwiseObservable f(cells);
    for (const auto& e : j)
        f.add_term(e.at("cell").get<int>(), e.at("m").get<double>(), e.at("n").get<double>(),
                   cplx(e.at("re").get<double>(), e.at("im").get<double>()));
    return f;
}

}  // namespace flowlab
