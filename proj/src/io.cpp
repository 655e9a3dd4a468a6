#include "dcflow/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dcflow {

namespace {

using nlohmann::json;

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) {
        throw ParseError(std::string("ParseError: ") + what + " must be an array of numbers");
    }
    Vector v(static_cast<Index>(j.size()));
    Index i = 0;
    for (const auto& x : j) {
        if (!x.is_number()) {
            throw ParseError(std::string("ParseError: ") + what + " must contain numbers only");
        }
        v(i++) = x.get<double>();
    }
    return v;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ParseError(std::string("ParseError: ") + what + " must be an array of rows");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j.front().size());
    Matrix m(rows, cols);
    Index r = 0;
    for (const auto& row : j) {
        if (static_cast<Index>(row.size()) != cols) {
            throw ParseError(std::string("ParseError: ragged rows in ") + what);
        }
        Index c = 0;
        for (const auto& x : row) m(r, c++) = x.get<double>();
        ++r;
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

GridInput parse_network_json(const nlohmann::json& j) {
    GridInput input;
    if (j.contains("Y_LL")) {
        const Matrix y_ll = matrix_from_json(j.at("Y_LL"), "Y_LL");
        const Matrix y_ls = matrix_from_json(j.at("Y_LS"), "Y_LS");
        input.v_s = vector_from_json(j.at("V_S"), "V_S");
        input.part = partition_from_direct(y_ll, y_ls);
        return input;
    }
    Network net;
    if (!j.contains("loads") || !j.contains("sources") || !j.contains("edges") ||
        !j.contains("source_voltages")) {
        throw ParseError(
            "ParseError: network file needs loads, sources, source_voltages, edges "
            "(or the direct Y_LL/Y_LS/V_S form)");
    }
    net.n_loads = j.at("loads").get<Index>();
    net.n_sources = j.at("sources").get<Index>();
    net.source_voltages = vector_from_json(j.at("source_voltages"), "source_voltages");
    for (const auto& e : j.at("edges")) {
        Edge edge;
        edge.a = e.at("a").get<Index>();
        edge.b = e.at("b").get<Index>();
        edge.g = e.at("g").get<double>();
        net.edges.push_back(edge);
    }
    input.part = build_kirchhoff(net);
    input.v_s = net.source_voltages;
    return input;
}

GridInput load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("ParseError: cannot open network file " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("ParseError: ") + path + ": " + e.what());
    }
    try {
        return parse_network_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("ParseError: ") + path + ": " + e.what());
    }
}

Vector parse_demand(const std::string& spec, Index n) {
    Vector demand;
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("ParseError: ") + spec + ": " + e.what());
        }
        demand = vector_from_json(j, "demand");
    } else {
        std::vector<double> values;
        std::stringstream ss(spec);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                size_t used = 0;
                const double x = std::stod(token, &used);
                while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
                if (used != token.size()) throw std::invalid_argument(token);
                values.push_back(x);
            } catch (const std::exception&) {
                throw ParseError("ParseError: demand entry '" + token + "' is not a number");
            }
        }
        demand = Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
    }
    if (demand.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal the load count");
    }
    if (!demand.allFinite()) {
        throw ParseError("ParseError: demand must be finite");
    }
    return demand;
}

nlohmann::json to_json(const GridSummary& s) {
    return json{{"n", s.n},
                {"m", s.m},
                {"v_star", vector_to_json(s.v_star)},
                {"i_star", vector_to_json(s.i_star)},
                {"p_max", vector_to_json(s.p_max)}};
}

nlohmann::json to_json(const DemandReport& d) {
    json j{{"demand", vector_to_json(d.demand)},
           {"verdict", d.verdict},
           {"fold_found", d.fold_found},
           {"certificate_status", d.certificate_status},
           {"decided_by", d.decided_by},
           {"seconds", d.seconds}};
    if (d.theta_star) j["theta_star"] = *d.theta_star;
    if (d.v_l) j["v_l"] = vector_to_json(*d.v_l);
    if (d.stability) j["stability"] = *d.stability;
    if (d.dissipation_w) j["dissipation_w"] = *d.dissipation_w;
    if (d.certificate) {
        j["certificate"] = json{{"nu", vector_to_json(d.certificate->nu)},
                                {"min_eig", d.certificate->min_eig}};
    }
    json conds = json::array();
    for (const auto& c : d.conditions) {
        conds.push_back(json{{"name", c.name}, {"outcome", c.outcome}});
    }
    j["conditions"] = conds;
    return j;
}

nlohmann::json to_json(const Report& r) {
    json demands = json::array();
    for (const auto& d : r.demands) demands.push_back(to_json(d));
    return json{{"grid", to_json(r.grid)}, {"demands", demands}, {"seconds", r.seconds}};
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    const json& g = j.at("grid");
    r.grid.n = g.at("n").get<Index>();
    r.grid.m = g.at("m").get<Index>();
    r.grid.v_star = vector_from_json(g.at("v_star"), "v_star");
    r.grid.i_star = vector_from_json(g.at("i_star"), "i_star");
    r.grid.p_max = vector_from_json(g.at("p_max"), "p_max");
    r.seconds = j.at("seconds").get<double>();
    for (const auto& dj : j.at("demands")) {
        DemandReport d;
        d.demand = vector_from_json(dj.at("demand"), "demand");
        d.verdict = dj.at("verdict").get<std::string>();
        d.fold_found = dj.at("fold_found").get<bool>();
        d.certificate_status = dj.at("certificate_status").get<std::string>();
        d.decided_by = dj.at("decided_by").get<std::string>();
        d.seconds = dj.at("seconds").get<double>();
        if (dj.contains("theta_star")) d.theta_star = dj.at("theta_star").get<double>();
        if (dj.contains("v_l")) d.v_l = vector_from_json(dj.at("v_l"), "v_l");
        if (dj.contains("stability")) d.stability = dj.at("stability").get<std::string>();
        if (dj.contains("dissipation_w")) d.dissipation_w = dj.at("dissipation_w").get<double>();
        if (dj.contains("certificate")) {
            InfeasibilityCertificate cert;
            cert.nu = vector_from_json(dj.at("certificate").at("nu"), "nu");
            cert.min_eig = dj.at("certificate").at("min_eig").get<double>();
            d.certificate = cert;
        }
        for (const auto& cj : dj.at("conditions")) {
            d.conditions.push_back(
                ConditionRecord{cj.at("name").get<std::string>(), cj.at("outcome").get<std::string>()});
        }
        r.demands.push_back(std::move(d));
    }
    return r;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_boundary_csv(std::ostream& os, const SweepResult& sweep) {
    if (sweep.points.empty()) {
        os << "family\n";
        return;
    }
    const Index n = sweep.points.front().v_l.size();
    os << "family";
    for (Index i = 0; i < n; ++i) os << ",param_" << i;
    for (Index i = 0; i < n; ++i) os << ",v_" << i;
    for (Index i = 0; i < n; ++i) os << ",p_" << i;
    os << "\r\n";
    for (const auto& bp : sweep.points) {
        switch (bp.family) {
            case ParamFamily::Lambda: os << "lambda"; break;
            case ParamFamily::Mu: os << "mu"; break;
            case ParamFamily::Nu: os << "nu"; break;
        }
        for (Index i = 0; i < n; ++i) os << "," << format_double(bp.param(i));
        for (Index i = 0; i < n; ++i) os << "," << format_double(bp.v_l(i));
        for (Index i = 0; i < n; ++i) os << "," << format_double(bp.p_c(i));
        os << "\r\n";
    }
}

void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
    if (trace.empty()) {
        os << "theta,perron_root\r\n";
        return;
    }
    const Index n = trace.front().v.size();
    os << "theta";
    for (Index i = 0; i < n; ++i) os << ",v_" << i;
    os << ",perron_root\r\n";
    for (const auto& t : trace) {
        os << format_double(t.theta);
        for (Index i = 0; i < n; ++i) os << "," << format_double(t.v(i));
        os << "," << format_double(t.perron_root) << "\r\n";
    }
}

void write_tight_points_csv(std::ostream& os, const std::vector<TightPoint>& points) {
    if (points.empty()) {
        os << "alpha\n";
        return;
    }
    const Index n = points.front().demand.size();
    os << "alpha";
    for (Index i = 0; i < n; ++i) os << ",p_" << i;
    os << "\r\n";
    for (const auto& tp : points) {
        os << "\"";
        for (size_t k = 0; k < tp.alpha.size(); ++k) {
            if (k) os << ";";
            os << tp.alpha[k];
        }
        os << "\"";
        for (Index i = 0; i < n; ++i) os << "," << format_double(tp.demand(i));
        os << "\r\n";
    }
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Interior: return "interior";
        case Verdict::Boundary: return "boundary";
        case Verdict::Infeasible: return "infeasible";
    }
    return "undecided";
}

std::string stability_name(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::SemiStableBoundary: return "semi_stable_boundary";
        case Stability::Outside: return "outside";
    }
    return "unknown";
}

int verdict_exit_code(const std::string& verdict) {
    if (verdict == "interior" || verdict == "feasible") return 0;
    if (verdict == "infeasible") return 2;
    if (verdict == "boundary") return 3;
    return 4;
}

}  // namespace dcflow
