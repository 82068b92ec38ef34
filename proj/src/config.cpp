#include "cstrbio/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cstrbio/errors.hpp"

namespace cstrbio {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;
    bool used = false;
};

struct Parsed {
    std::map<std::string, Entry> entries;

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    const Entry& require(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end())
            throw ConfigError("missing required key '" + key + "'", 0, 0);
        it->second.used = true;
        return it->second;
    }

    const Entry* optional(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
};

double parse_number(const Entry& e, const std::string& key) {
    const char* text = e.value.c_str();
    char* end = nullptr;
    const double v = std::strtod(text, &end);
    if (end == text || *end != '\0')
        throw ConfigError("invalid number for key '" + key + "': '" + e.value + "'", e.line,
                          e.column);
    return v;
}

double positive(Parsed& p, const std::string& key) {
    const Entry& e = p.require(key);
    const double v = parse_number(e, key);
    if (!(v > 0.0))
        throw ConfigError("key '" + key + "' must be > 0", e.line, e.column);
    return v;
}

double nonnegative(Parsed& p, const std::string& key) {
    const Entry& e = p.require(key);
    const double v = parse_number(e, key);
    if (v < 0.0)
        throw ConfigError("key '" + key + "' must be >= 0", e.line, e.column);
    return v;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

Parsed tokenize(const std::string& text) {
    Parsed out;
    std::istringstream stream(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(stream, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t hash = raw.find('#');
        std::string line = (hash == std::string::npos) ? raw : raw.substr(0, hash);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineno, 1);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::size_t col = line.find_first_not_of(" \t");
        if (col == std::string::npos) col = 0;
        if (key.empty())
            throw ConfigError("empty key", lineno, static_cast<int>(col) + 1);
        if (value.empty())
            throw ConfigError("empty value for key '" + key + "'", lineno,
                              static_cast<int>(eq) + 2);
        if (out.entries.count(key))
            throw ConfigError("duplicate key '" + key + "'", lineno,
                              static_cast<int>(col) + 1);
        out.entries[key] = {value, lineno, static_cast<int>(col) + 1};
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    Parsed p = tokenize(text);

    if (p.has("k2")) {
        const Entry& e = p.entries.at("k2");
        throw ConfigError("k2 is derived from D + kQ and cannot be set", e.line, e.column);
    }

    ScenarioConfig cfg;
    cfg.params.kappa = positive(p, "kappa");
    cfg.params.D = positive(p, "D");
    cfg.params.k1 = positive(p, "k1");
    cfg.params.kQ = positive(p, "kQ");
    cfg.params.alpha = positive(p, "alpha");
    cfg.params.rho = positive(p, "rho");
    cfg.params.beta = positive(p, "beta");
    cfg.params.sstar = positive(p, "sstar");

    const Entry& rk = p.require("r_kind");
    if (rk.value == "monod") {
        cfg.kinetics.r = MonodLaw{positive(p, "mu_r"), positive(p, "K_r")};
    } else if (rk.value == "linear") {
        cfg.kinetics.r = LinearLaw{positive(p, "r_slope")};
    } else {
        throw ConfigError("r_kind must be 'monod' or 'linear'", rk.line, rk.column);
    }

    const Entry& nk = p.require("nu_kind");
    if (nk.value != "monod")
        throw ConfigError("nu_kind must be 'monod'", nk.line, nk.column);
    cfg.kinetics.nu = MonodLaw{positive(p, "mu_nu"), positive(p, "K_nu")};

    const Entry& gk = p.require("g_kind");
    if (gk.value != "affine")
        throw ConfigError("g_kind must be 'affine'", gk.line, gk.column);
    cfg.kinetics.g = AffineLaw{positive(p, "g_a"), positive(p, "g_b")};

    const Entry& dk = p.require("d_kind");
    if (dk.value == "linear") {
        cfg.kinetics.d = LinearLaw{positive(p, "d0")};
    } else if (dk.value == "constant") {
        cfg.kinetics.d = ConstantLaw{positive(p, "d0")};
    } else {
        throw ConfigError("d_kind must be 'linear' or 'constant'", dk.line, dk.column);
    }

    cfg.h0 = nonnegative(p, "h0");
    cfg.S0 = nonnegative(p, "S0");
    cfg.Q0 = nonnegative(p, "Q0");

    if (const Entry* e = p.optional("bvp_n")) {
        const double v = parse_number(*e, "bvp_n");
        cfg.bvp_n = static_cast<int>(v);
        if (cfg.bvp_n != v || cfg.bvp_n < 8 || cfg.bvp_n % 2 != 0)
            throw ConfigError("bvp_n must be an even integer >= 8", e->line, e->column);
    }
    if (const Entry* e = p.optional("bvp_tol")) {
        cfg.bvp_tol = parse_number(*e, "bvp_tol");
        if (!(cfg.bvp_tol > 0.0))
            throw ConfigError("bvp_tol must be > 0", e->line, e->column);
    }
    if (const Entry* e = p.optional("ode_rtol")) {
        cfg.ode_rtol = parse_number(*e, "ode_rtol");
        if (!(cfg.ode_rtol > 0.0))
            throw ConfigError("ode_rtol must be > 0", e->line, e->column);
    }
    if (const Entry* e = p.optional("t_end")) {
        cfg.t_end = parse_number(*e, "t_end");
        if (cfg.t_end < 0.0)
            throw ConfigError("t_end must be >= 0", e->line, e->column);
    }
    if (const Entry* e = p.optional("sample_dt")) {
        cfg.sample_dt = parse_number(*e, "sample_dt");
        if (!(cfg.sample_dt > 0.0))
            throw ConfigError("sample_dt must be > 0", e->line, e->column);
    }

    for (const auto& [key, entry] : p.entries) {
        if (!entry.used)
            throw ConfigError("unknown key '" + key + "'", entry.line, entry.column);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "# reactor\n";
    out << "kappa = " << num(cfg.params.kappa) << "\n";
    out << "D = " << num(cfg.params.D) << "\n";
    out << "k1 = " << num(cfg.params.k1) << "\n";
    out << "kQ = " << num(cfg.params.kQ) << "\n";
    out << "alpha = " << num(cfg.params.alpha) << "\n";
    out << "rho = " << num(cfg.params.rho) << "\n";
    out << "beta = " << num(cfg.params.beta) << "\n";
    out << "sstar = " << num(cfg.params.sstar) << "\n";
    out << "# kinetics\n";
    if (const auto* m = std::get_if<MonodLaw>(&cfg.kinetics.r)) {
        out << "r_kind = monod\n";
        out << "mu_r = " << num(m->vmax) << "\n";
        out << "K_r = " << num(m->K) << "\n";
    } else {
        out << "r_kind = linear\n";
        out << "r_slope = " << num(std::get<LinearLaw>(cfg.kinetics.r).slope) << "\n";
    }
    const auto& nu = std::get<MonodLaw>(cfg.kinetics.nu);
    out << "nu_kind = monod\n";
    out << "mu_nu = " << num(nu.vmax) << "\n";
    out << "K_nu = " << num(nu.K) << "\n";
    const auto& g = std::get<AffineLaw>(cfg.kinetics.g);
    out << "g_kind = affine\n";
    out << "g_a = " << num(g.gain) << "\n";
    out << "g_b = " << num(g.offset) << "\n";
    if (const auto* d = std::get_if<LinearLaw>(&cfg.kinetics.d)) {
        out << "d_kind = linear\n";
        out << "d0 = " << num(d->slope) << "\n";
    } else {
        out << "d_kind = constant\n";
        out << "d0 = " << num(std::get<ConstantLaw>(cfg.kinetics.d).value) << "\n";
    }
    out << "# initial state\n";
    out << "h0 = " << num(cfg.h0) << "\n";
    out << "S0 = " << num(cfg.S0) << "\n";
    out << "Q0 = " << num(cfg.Q0) << "\n";
    out << "# solver\n";
    out << "bvp_n = " << cfg.bvp_n << "\n";
    out << "bvp_tol = " << num(cfg.bvp_tol) << "\n";
    out << "ode_rtol = " << num(cfg.ode_rtol) << "\n";
    out << "t_end = " << num(cfg.t_end) << "\n";
    out << "sample_dt = " << num(cfg.sample_dt) << "\n";
    return out.str();
}

} // namespace cstrbio
