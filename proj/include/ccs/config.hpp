// Run configuration: a nested-section key-value text format.
//
//   # comment
//   [problem]
//   builtin = example1
//   [problem.constraint1]
//   kind = equality
//
// Keys are schema-checked; unknown sections or keys are rejected with the
// offending line number. "auto" marks values resolved at solve time; the
// resolved-config echo re-emits every key so a run is reproducible from
// its output directory alone.
#pragma once

#include "ccs/chain.hpp"
#include "ccs/csv.hpp"
#include "ccs/dual.hpp"
#include "ccs/errors.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ccs {

struct ConstraintConfig {
    std::string kind = "equality";       // equality | inequality
    std::string map = "linear";          // linear | quadratic: c0 + c1 x (+ c2 x^2)
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double target = 0.0;

    bool operator==(const ConstraintConfig&) const = default;
};

struct RunConfig {
    // [problem]
    std::string builtin;                 // example1 | example2 | "" for families
    std::string family;                  // lq | bounded_drift | "" when builtin set
    double sigma = 1.0;
    double aT = 0.0, bT = 0.0, cT = 0.0; // lq terminal quadratic
    double kappa = 1.0;                  // bounded_drift reversion
    std::string running_cost = "quadratic";  // quadratic | none
    double x0 = 0.0;
    double T = 1.0;
    std::vector<ConstraintConfig> constraints;

    // [disc]
    std::optional<double> h;
    std::vector<double> h_list;
    std::optional<double> dx;            // empty = sqrt(h / cfl_target)
    double cfl_target = 0.1;
    std::optional<double> x_min, x_max;  // empty = auto bounds
    double control_min = -6.0, control_max = 6.0, control_step = 0.1;
    // exact keeps both increment moments tight (best accuracy, strictest
    // CFL); upwind accepts an O(dx) variance surplus for a CFL condition
    // that tolerates coarse steps under strong drift.
    std::string kernel = "exact";        // exact | upwind | centered

    // [dual]
    std::optional<double> M, eps;        // empty = measured
    std::string step = "auto";           // auto | constant | diminishing | polyak
    std::optional<double> theta0;
    std::optional<double> target;        // polyak target; empty = analytic ref when known
    double grad_tol = 1e-4;
    int max_iters = 500;
    double cert_tol = 5e-2;

    // [qualify]
    bool qualify_enabled = true;
    double qualify_target_eps = 1e-3;
    int qualify_max_iters = 200;

    // [mc]
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 20240612;
    bool store_paths = false;

    // [rate]
    std::optional<double> reference_value, reference_lambda;  // empty = analytic ref
    bool full_range = false;

    // [outputs]
    std::string out_dir = "out";
    bool write_value_table = false;
    bool write_distribution = false;
    bool write_trace = true;

    bool operator==(const RunConfig&) const = default;
};

namespace cfgdetail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string section, key, value;
    int line = 0;
};

inline std::vector<Entry> parse_entries(std::istream& in, const std::string& filename) {
    std::vector<Entry> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(filename, lineno, "malformed section header: " + s);
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError(filename, lineno, "empty section name");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(filename, lineno, "expected key = value, got: " + s);
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(filename, lineno, "empty key");
        if (section.empty())
            throw ConfigError(filename, lineno, "key outside any [section]");
        out.push_back({section, key, value, lineno});
    }
    return out;
}

inline double parse_double(const Entry& e, const std::string& file) {
    try {
        std::size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(file, e.line, "expected a number for " + e.key + ", got: " + e.value);
    }
}

inline long long parse_int(const Entry& e, const std::string& file) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(file, e.line, "expected an integer for " + e.key + ", got: " + e.value);
    }
}

inline bool parse_bool(const Entry& e, const std::string& file) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(file, e.line, "expected true/false for " + e.key + ", got: " + e.value);
}

inline std::optional<double> parse_auto_double(const Entry& e, const std::string& file) {
    if (e.value == "auto") return std::nullopt;
    return parse_double(e, file);
}

inline std::vector<double> parse_double_list(const Entry& e, const std::string& file) {
    std::vector<double> out;
    std::istringstream iss(e.value);
    std::string tok;
    while (iss >> tok) {
        Entry sub{e.section, e.key, tok, e.line};
        out.push_back(parse_double(sub, file));
    }
    if (out.empty())
        throw ConfigError(file, e.line, "expected at least one number for " + e.key);
    return out;
}

} // namespace cfgdetail

inline RunConfig parse_config(std::istream& in, const std::string& filename) {
    using namespace cfgdetail;
    RunConfig c;
    std::map<int, ConstraintConfig> constraint_map;

    for (const Entry& e : parse_entries(in, filename)) {
        const std::string& s = e.section;
        const std::string& k = e.key;
        if (s == "problem") {
            if (k == "builtin") c.builtin = e.value;
            else if (k == "family") c.family = e.value;
            else if (k == "sigma") c.sigma = parse_double(e, filename);
            else if (k == "aT") c.aT = parse_double(e, filename);
            else if (k == "bT") c.bT = parse_double(e, filename);
            else if (k == "cT") c.cT = parse_double(e, filename);
            else if (k == "kappa") c.kappa = parse_double(e, filename);
            else if (k == "running_cost") c.running_cost = e.value;
            else if (k == "x0") c.x0 = parse_double(e, filename);
            else if (k == "T") c.T = parse_double(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [problem] " + k);
        } else if (s.rfind("problem.constraint", 0) == 0) {
            int idx = 0;
            try {
                idx = std::stoi(s.substr(std::string("problem.constraint").size()));
            } catch (...) {
                throw ConfigError(filename, e.line, "bad constraint section name: " + s);
            }
            ConstraintConfig& cc = constraint_map[idx];
            if (k == "kind") cc.kind = e.value;
            else if (k == "map") cc.map = e.value;
            else if (k == "c0") cc.c0 = parse_double(e, filename);
            else if (k == "c1") cc.c1 = parse_double(e, filename);
            else if (k == "c2") cc.c2 = parse_double(e, filename);
            else if (k == "target") cc.target = parse_double(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [" + s + "] " + k);
            if (cc.kind != "equality" && cc.kind != "inequality")
                throw ConfigError(filename, e.line, "constraint kind must be equality or inequality");
            if (cc.map != "linear" && cc.map != "quadratic")
                throw ConfigError(filename, e.line, "constraint map must be linear or quadratic");
        } else if (s == "disc") {
            if (k == "h") c.h = parse_double(e, filename);
            else if (k == "h_list") c.h_list = parse_double_list(e, filename);
            else if (k == "dx") c.dx = parse_auto_double(e, filename);
            else if (k == "cfl_target") c.cfl_target = parse_double(e, filename);
            else if (k == "x_min") c.x_min = parse_auto_double(e, filename);
            else if (k == "x_max") c.x_max = parse_auto_double(e, filename);
            else if (k == "control_min") c.control_min = parse_double(e, filename);
            else if (k == "control_max") c.control_max = parse_double(e, filename);
            else if (k == "control_step") c.control_step = parse_double(e, filename);
            else if (k == "kernel") {
                if (e.value != "upwind" && e.value != "centered" && e.value != "exact")
                    throw ConfigError(filename, e.line, "kernel must be upwind, centered or exact");
                c.kernel = e.value;
            } else throw ConfigError(filename, e.line, "unknown key [disc] " + k);
        } else if (s == "dual") {
            if (k == "M") c.M = parse_auto_double(e, filename);
            else if (k == "eps") c.eps = parse_auto_double(e, filename);
            else if (k == "step") {
                if (e.value != "auto" && e.value != "constant" && e.value != "diminishing" &&
                    e.value != "polyak")
                    throw ConfigError(filename, e.line, "step must be auto, constant, diminishing or polyak");
                c.step = e.value;
            } else if (k == "theta0") c.theta0 = parse_auto_double(e, filename);
            else if (k == "target") c.target = parse_auto_double(e, filename);
            else if (k == "grad_tol") c.grad_tol = parse_double(e, filename);
            else if (k == "max_iters") c.max_iters = static_cast<int>(parse_int(e, filename));
            else if (k == "cert_tol") c.cert_tol = parse_double(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [dual] " + k);
        } else if (s == "qualify") {
            if (k == "enabled") c.qualify_enabled = parse_bool(e, filename);
            else if (k == "target_eps") c.qualify_target_eps = parse_double(e, filename);
            else if (k == "max_iters") c.qualify_max_iters = static_cast<int>(parse_int(e, filename));
            else throw ConfigError(filename, e.line, "unknown key [qualify] " + k);
        } else if (s == "mc") {
            if (k == "n_paths") c.n_paths = parse_int(e, filename);
            else if (k == "seed") c.seed = static_cast<std::uint64_t>(parse_int(e, filename));
            else if (k == "store_paths") c.store_paths = parse_bool(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [mc] " + k);
        } else if (s == "rate") {
            if (k == "reference_value") c.reference_value = parse_auto_double(e, filename);
            else if (k == "reference_lambda") c.reference_lambda = parse_auto_double(e, filename);
            else if (k == "full_range") c.full_range = parse_bool(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [rate] " + k);
        } else if (s == "outputs") {
            if (k == "dir") c.out_dir = e.value;
            else if (k == "write_value_table") c.write_value_table = parse_bool(e, filename);
            else if (k == "write_distribution") c.write_distribution = parse_bool(e, filename);
            else if (k == "write_trace") c.write_trace = parse_bool(e, filename);
            else throw ConfigError(filename, e.line, "unknown key [outputs] " + k);
        } else {
            throw ConfigError(filename, e.line, "unknown section [" + s + "]");
        }
    }
    for (auto& [idx, cc] : constraint_map) c.constraints.push_back(cc);

    if (!c.builtin.empty() && !c.family.empty())
        throw ConfigError(filename, 0, "set either builtin or family, not both");
    if (c.builtin.empty() && c.family.empty())
        throw ConfigError(filename, 0, "one of [problem] builtin or family is required");
    if (c.running_cost != "quadratic" && c.running_cost != "none")
        throw ConfigError(filename, 0, "running_cost must be quadratic or none");
    // [disc] h is demanded by the commands that need it; rate studies fall
    // back to a default h list.
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    return parse_config(in, path);
}

// Emits every key explicitly (defaults applied, "auto" preserved) so the
// echo reparses to the identical RunConfig.
inline void write_config_echo(std::ostream& out, const RunConfig& c) {
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("auto");
    };
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "# resolved run configuration\n[problem]\n";
    if (!c.builtin.empty()) out << "builtin = " << c.builtin << "\n";
    if (!c.family.empty()) out << "family = " << c.family << "\n";
    out << "sigma = " << format_double(c.sigma) << "\n"
        << "aT = " << format_double(c.aT) << "\n"
        << "bT = " << format_double(c.bT) << "\n"
        << "cT = " << format_double(c.cT) << "\n"
        << "kappa = " << format_double(c.kappa) << "\n"
        << "running_cost = " << c.running_cost << "\n"
        << "x0 = " << format_double(c.x0) << "\n"
        << "T = " << format_double(c.T) << "\n";
    for (std::size_t i = 0; i < c.constraints.size(); ++i) {
        const auto& cc = c.constraints[i];
        out << "[problem.constraint" << (i + 1) << "]\n"
            << "kind = " << cc.kind << "\n"
            << "map = " << cc.map << "\n"
            << "c0 = " << format_double(cc.c0) << "\n"
            << "c1 = " << format_double(cc.c1) << "\n"
            << "c2 = " << format_double(cc.c2) << "\n"
            << "target = " << format_double(cc.target) << "\n";
    }
    out << "[disc]\n";
    if (c.h) out << "h = " << format_double(*c.h) << "\n";
    if (!c.h_list.empty()) {
        out << "h_list =";
        for (double h : c.h_list) out << " " << format_double(h);
        out << "\n";
    }
    out << "dx = " << opt(c.dx) << "\n"
        << "cfl_target = " << format_double(c.cfl_target) << "\n"
        << "x_min = " << opt(c.x_min) << "\n"
        << "x_max = " << opt(c.x_max) << "\n"
        << "control_min = " << format_double(c.control_min) << "\n"
        << "control_max = " << format_double(c.control_max) << "\n"
        << "control_step = " << format_double(c.control_step) << "\n"
        << "kernel = " << c.kernel << "\n";
    out << "[dual]\n"
        << "M = " << opt(c.M) << "\n"
        << "eps = " << opt(c.eps) << "\n"
        << "step = " << c.step << "\n"
        << "theta0 = " << opt(c.theta0) << "\n"
        << "target = " << opt(c.target) << "\n"
        << "grad_tol = " << format_double(c.grad_tol) << "\n"
        << "max_iters = " << c.max_iters << "\n"
        << "cert_tol = " << format_double(c.cert_tol) << "\n";
    out << "[qualify]\n"
        << "enabled = " << b(c.qualify_enabled) << "\n"
        << "target_eps = " << format_double(c.qualify_target_eps) << "\n"
        << "max_iters = " << c.qualify_max_iters << "\n";
    out << "[mc]\n"
        << "n_paths = " << c.n_paths << "\n"
        << "seed = " << c.seed << "\n"
        << "store_paths = " << b(c.store_paths) << "\n";
    out << "[rate]\n"
        << "reference_value = " << opt(c.reference_value) << "\n"
        << "reference_lambda = " << opt(c.reference_lambda) << "\n"
        << "full_range = " << b(c.full_range) << "\n";
    out << "[outputs]\n"
        << "dir = " << c.out_dir << "\n"
        << "write_value_table = " << b(c.write_value_table) << "\n"
        << "write_distribution = " << b(c.write_distribution) << "\n"
        << "write_trace = " << b(c.write_trace) << "\n";
}

} // namespace ccs
