#include "bubblelab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>

namespace bubblelab {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("BUBBLELAB_LOG");
        if (!env) return LogLevel::warn;
        const std::string s(env);
        if (s == "error") return LogLevel::error;
        if (s == "warn") return LogLevel::warn;
        if (s == "info") return LogLevel::info;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[" << names[int(level)] << "] " << msg << "\n";
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw ValidationError("cannot open output file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 == header.size() ? "\n" : ",");
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw NumericalError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << fmt_g17(values[i]) << (i + 1 == values.size() ? "\n" : ",");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_)
        throw NumericalError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << values[i] << (i + 1 == values.size() ? "\n" : ",");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") +
                              e.what());
    }
}

namespace {
double need_number(const nlohmann::json& j, const std::string& block,
                   const std::string& key) {
    if (!j.contains(key))
        throw ValidationError("missing \"" + key + "\" in " + block);
    if (!j[key].is_number())
        throw ValidationError("\"" + key + "\" in " + block +
                              " must be a number");
    return j[key].get<double>();
}
}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    if (!j.contains("params"))
        throw ValidationError("missing \"params\" block");
    const nlohmann::json& pj = j["params"];
    static const std::set<std::string> allowed = {
        "sigma", "sigma_bar", "mu_l", "rho_l", "kappa", "c_g",
        "R_spec", "T_inf", "gamma", "M", "V"};
    for (auto it = pj.begin(); it != pj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError("unknown key \"" + it.key() +
                                  "\" in params");
    PhysicalParams p;
    p.sigma = need_number(pj, "params", "sigma");
    p.sigma_bar = need_number(pj, "params", "sigma_bar");
    p.mu_l = need_number(pj, "params", "mu_l");
    p.rho_l = need_number(pj, "params", "rho_l");
    p.kappa = need_number(pj, "params", "kappa");
    p.c_g = need_number(pj, "params", "c_g");
    p.R_spec = need_number(pj, "params", "R_spec");
    p.T_inf = need_number(pj, "params", "T_inf");
    if (pj.contains("gamma"))
        p.gamma = pj["gamma"].get<double>();
    else
        p = with_derived_gamma(p);
    cfg.params = validate_params(p);

    bool have_M = false, have_V = false;
    if (pj.contains("M")) {
        cfg.M = pj["M"].get<double>();
        have_M = true;
    }
    if (pj.contains("V")) {
        cfg.V = pj["V"].get<double>();
        have_V = true;
    }
    if (j.contains("problem")) {
        const auto& prob = j["problem"];
        if (prob.contains("M")) {
            cfg.M = prob["M"].get<double>();
            have_M = true;
        }
        if (prob.contains("V")) {
            cfg.V = prob["V"].get<double>();
            have_V = true;
        }
    }
    if (!have_M) throw ValidationError("missing \"M\" in params or problem");
    if (!have_V) throw ValidationError("missing \"V\" in params or problem");

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        if (s.contains("N")) cfg.N = s["N"].get<int>();
        if (s.contains("rtol")) cfg.rtol = s["rtol"].get<double>();
        if (s.contains("atol")) cfg.atol = s["atol"].get<double>();
        if (s.contains("t_end")) cfg.t_end = s["t_end"].get<double>();
        if (s.contains("output_dt")) cfg.output_dt = s["output_dt"].get<double>();
        if (s.contains("backend")) cfg.backend = s["backend"].get<std::string>();
        if (s.contains("stepper")) cfg.stepper = s["stepper"].get<std::string>();
        if (s.contains("grid")) cfg.grid = s["grid"].get<int>();
        if (cfg.backend != "galerkin" && cfg.backend != "fd")
            throw ValidationError("solver.backend must be galerkin or fd");
        if (cfg.N < 1) throw ValidationError("solver.N must be positive");
    }
    if (j.contains("ic")) {
        const auto& ic = j["ic"];
        if (ic.contains("eps")) cfg.ic.eps = ic["eps"].get<double>();
        if (ic.contains("delta")) cfg.ic.delta = ic["delta"].get<double>();
        if (ic.contains("dR0")) cfg.ic.dR0 = ic["dR0"].get<double>();
        if (ic.contains("shape")) cfg.ic.shape = ic["shape"].get<std::string>();
        if (ic.contains("mode_k")) cfg.ic.mode_k = ic["mode_k"].get<int>();
    }
    if (j.contains("spectrum")) {
        const auto& s = j["spectrum"];
        if (s.contains("window")) {
            const auto& w = s["window"];
            if (w.contains("re_lo")) cfg.win_re_lo = w["re_lo"].get<double>();
            if (w.contains("re_hi")) cfg.win_re_hi = w["re_hi"].get<double>();
            if (w.contains("im_max")) cfg.win_im_max = w["im_max"].get<double>();
        }
        if (s.contains("max_subdiv")) cfg.max_subdiv = s["max_subdiv"].get<int>();
        if (s.contains("N")) cfg.spectrum_N = s["N"].get<int>();
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        if (s.contains("axis")) cfg.sweep_axis = s["axis"].get<std::string>();
        if (s.contains("values"))
            cfg.sweep_values = s["values"].get<std::vector<double>>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

}  // namespace bubblelab
