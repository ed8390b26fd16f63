#include "mms/json_io.hpp"

#include <fstream>

namespace mms {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::BadInput, "parse failure in " + path + ": " + e.what());
    }
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::BadInput, "cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::BadInput, "cannot write " + path);
    out << text;
}

DiscreteSpace space_from_json(const json& j) {
    if (!j.contains("nodes") || !j.contains("metric") || !j.contains("measure"))
        throw Error(ErrorCode::BadInput, "space needs nodes, metric and measure");
    std::vector<std::string> nodes;
    for (const auto& v : j.at("nodes")) {
        if (v.is_string())
            nodes.push_back(v.get<std::string>());
        else
            nodes.push_back(v.dump());
    }
    const std::size_t n = nodes.size();
    std::vector<double> measure = j.at("measure").get<std::vector<double>>();
    if (measure.size() != n) throw Error(ErrorCode::BadInput, "measure length mismatch");

    const json& metric = j.at("metric");
    const std::string type = metric.at("type").get<std::string>();
    if (type == "matrix") {
        DistMatrix dist(n);
        for (std::size_t i = 0; i < n; ++i) dist(i, i) = 0.0;
        for (const auto& e : metric.at("entries")) {
            const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            const double d = e.at(2).get<double>();
            if (a < 0 || b < 0 || a >= (int)n || b >= (int)n)
                throw Error(ErrorCode::BadInput, "matrix entry index out of range");
            dist((std::size_t)a, (std::size_t)b) = d;
            dist((std::size_t)b, (std::size_t)a) = d;
        }
        return DiscreteSpace::from_matrix(std::move(nodes), std::move(dist), std::move(measure));
    }
    if (type == "graph") {
        std::vector<std::tuple<int, int, double>> edges;
        for (const auto& e : metric.at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
        return DiscreteSpace::from_graph(std::move(nodes), edges, std::move(measure));
    }
    throw Error(ErrorCode::BadInput, "unknown metric type: " + type);
}

DiscreteSpace load_space(const std::string& path) { return space_from_json(load_json(path)); }

PathFamily family_from_json(const json& j, const DiscreteSpace& space) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit") {
        std::vector<Arc> arcs;
        for (const auto& p : j.at("paths")) arcs.emplace_back(p.get<std::vector<int>>(), space);
        return PathFamily::explicit_family(std::move(arcs));
    }
    if (kind == "connector") {
        return PathFamily::connector(j.at("source").get<std::vector<int>>(),
                                     j.at("target").get<std::vector<int>>(),
                                     j.at("maxEdges").get<int>());
    }
    throw Error(ErrorCode::BadInput, "unknown family kind: " + kind);
}

PathFamily load_family(const std::string& path, const DiscreteSpace& space) {
    return family_from_json(load_json(path), space);
}

std::vector<double> vector_from_json(const json& j, std::size_t expected) {
    std::vector<double> v;
    if (j.is_array())
        v = j.get<std::vector<double>>();
    else if (j.contains("values"))
        v = j.at("values").get<std::vector<double>>();
    else
        throw Error(ErrorCode::BadInput, "expected an array or {\"values\": [...]}");
    if (expected != 0 && v.size() != expected)
        throw Error(ErrorCode::BadInput, "vector length mismatch");
    return v;
}

std::vector<double> load_vector(const std::string& path, std::size_t expected) {
    return vector_from_json(load_json(path), expected);
}

} // namespace mms
