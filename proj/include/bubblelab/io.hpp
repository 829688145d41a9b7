#pragma once
//
// Config ingestion (JSON), CSV emission, and leveled logging. All numbers
// are printed with "%.17g" so identical runs produce byte-identical files.
//
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bubblelab/dynamics.hpp"

namespace bubblelab {

std::string fmt_g17(double v);

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };
LogLevel log_level();  // from BUBBLELAB_LOG in {error,warn,info,debug}
void log_msg(LogLevel level, const std::string& msg);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

  private:
    std::ofstream out_;
    std::size_t columns_;
};

struct RunConfig {
    PhysicalParams params;
    double M = 1.0, V = 1.0;
    // solver block
    int N = 64;
    double rtol = 1e-8, atol = 1e-13;
    double t_end = 0.0;      // 0: auto, 5/(pi^2 kappa_bar)
    double output_dt = 0.0;  // 0: t_end/400
    std::string backend = "galerkin";  // or "fd"
    std::string stepper = "trbdf2";
    int grid = 512;
    IcProfile ic;
    // spectrum block
    double win_re_lo = 0.0, win_re_hi = 0.0, win_im_max = 0.0;  // 0: defaults
    int max_subdiv = 12;
    int spectrum_N = 128;
    // sweep block (optional; CLI flags take precedence)
    std::string sweep_axis;
    std::vector<double> sweep_values;
    std::uint64_t seed = 0;
};

nlohmann::json read_json_file(const std::string& path);

// Parses the full run config; throws ValidationError naming the first
// missing/unknown key. The parameter block accepts exactly the keys
// {sigma, sigma_bar, mu_l, rho_l, kappa, c_g, R_spec, T_inf, gamma, M, V}
// with gamma optional (derived) and M, V allowed in "problem" instead.
RunConfig parse_config(const nlohmann::json& j);

}  // namespace bubblelab
