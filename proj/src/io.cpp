#include "rhc/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rhc/taylor.hpp"

namespace rhc {

using nlohmann::json;

// --- logging ---------------------------------------------------------------

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("RHC_LOG");
        if (!env) return LogLevel::error;
        const std::string s(env);
        if (s == "debug") return LogLevel::debug;
        if (s == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::info) {
        std::cerr << "[info] " << message << "\n";
    }
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::debug) {
        std::cerr << "[debug] " << message << "\n";
    }
}

// --- JSON helpers ----------------------------------------------------------

namespace {

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
}

Mat parse_mat(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw IoError("key '" + key + "' must be an array of rows");
    }
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Mat M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) {
            throw IoError("key '" + key + "' has ragged rows");
        }
        for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
    }
    return M;
}

Vec parse_vec(const json& j, const std::string& key) {
    if (!j.is_array()) throw IoError("key '" + key + "' must be an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

// Applies "a.b.c=value" onto the parsed config. The value is interpreted as
// JSON when it parses as such, else taken as a string.
void apply_overrides(json& j, const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw IoError("override must look like KEY=VALUE: " + kv);
        }
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
        if (value.is_discarded()) value = raw;

        json* node = &j;
        size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(
                start, dot == std::string::npos ? std::string::npos : dot - start);
            if (part.empty()) throw IoError("bad override key: " + key);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
}

SolverOptions parse_solver(const json& j) {
    SolverOptions opts;
    if (!j.contains("solver")) return opts;
    const json& s = j.at("solver");
    opts.grad_tol = s.value("grad_tol", opts.grad_tol);
    opts.max_iters = s.value("max_iters", opts.max_iters);
    opts.lbfgs_memory = s.value("lbfgs_memory", opts.lbfgs_memory);
    opts.h = s.value("h", opts.h);
    return opts;
}

std::string resolve_path(const std::string& config_path, const std::string& ref) {
    std::filesystem::path p(ref);
    if (p.is_absolute()) return ref;
    return (std::filesystem::path(config_path).parent_path() / p).string();
}

TerminalPenalty parse_phi(const json& j, const BilinearSystem& sys) {
    std::string kind = "taylor2";
    if (j.contains("phi")) kind = j.at("phi").value("kind", kind);
    if (kind == "zero") return TerminalPenalty::Zero();
    if (kind == "quadratic") {
        if (!j.contains("phi") || !j.at("phi").contains("Q")) {
            throw IoError("phi.kind=quadratic needs phi.Q");
        }
        return TerminalPenalty::Quadratic(parse_mat(j.at("phi").at("Q"), "phi.Q"));
    }
    if (kind == "taylor2" || kind == "taylor3") {
        const RiccatiSolution ric = solve_are(sys);
        if (kind == "taylor2") return TerminalPenalty::Taylor2(ric.Pi);
        return TerminalPenalty::Taylor3(ric.Pi, solve_cubic_term(sys, ric));
    }
    throw IoError("unknown phi.kind: " + kind);
}

}  // namespace

// --- public loaders --------------------------------------------------------

BilinearSystem load_system(const std::string& path) {
    const json j = read_json(path);
    try {
        BilinearSystem sys;
        sys.A = parse_mat(j.at("A"), "A");
        sys.B = parse_vec(j.at("B"), "B");
        sys.N = parse_mat(j.at("N"), "N");
        sys.C = parse_mat(j.at("C"), "C");
        sys.alpha = j.at("alpha").get<double>();
        sys.check();
        return sys;
    } catch (const json::exception& e) {
        throw IoError("bad system file " + path + ": " + e.what());
    }
}

void save_system(const BilinearSystem& sys, const std::string& path) {
    json j;
    j["A"] = mat_to_json(sys.A);
    j["B"] = std::vector<double>(sys.B.data(), sys.B.data() + sys.B.size());
    j["N"] = mat_to_json(sys.N);
    j["C"] = mat_to_json(sys.C);
    j["alpha"] = sys.alpha;
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
    json j = read_json(path);
    apply_overrides(j, overrides);
    try {
        RunConfig rc;
        rc.system = load_system(
            resolve_path(path, j.at("system").get<std::string>()));
        rc.y0 = parse_vec(j.at("y0"), "y0");
        rc.cfg.tau = j.at("tau").get<double>();
        rc.cfg.T = j.at("T").get<double>();
        rc.cfg.L = j.value("L", 5.0);
        rc.cfg.opts = parse_solver(j);
        rc.cfg.phi = parse_phi(j, rc.system);
        return rc;
    } catch (const json::exception& e) {
        throw IoError("bad run config " + path + ": " + e.what());
    }
}

SweepSpec load_sweep_spec(const std::string& path,
                          const std::vector<std::string>& overrides) {
    json j = read_json(path);
    apply_overrides(j, overrides);
    try {
        SweepSpec spec;
        spec.system = load_system(
            resolve_path(path, j.at("system").get<std::string>()));
        spec.y0 = parse_vec(j.at("y0"), "y0");
        for (double v : j.at("tau_values").get<std::vector<double>>()) {
            spec.tau_values.push_back(v);
        }
        for (double v : j.at("T_values").get<std::vector<double>>()) {
            spec.T_values.push_back(v);
        }
        if (j.contains("penalties")) {
            for (int k : j.at("penalties").get<std::vector<int>>()) {
                if (k < 1 || k > 3) throw IoError("penalties entries must be 1..3");
                spec.penalties.push_back(static_cast<PenaltyOrder>(k));
            }
        } else {
            spec.penalties = {PenaltyOrder::k1, PenaltyOrder::k2,
                              PenaltyOrder::k3};
        }
        spec.L = j.value("L", 5.0);
        spec.opts = parse_solver(j);
        spec.check();
        return spec;
    } catch (const json::exception& e) {
        throw IoError("bad sweep spec " + path + ": " + e.what());
    }
}

}  // namespace rhc
