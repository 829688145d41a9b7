//
// Timing comparison of the serial reference kernels against their
// OpenMP-parallel versions: dense polynomial sign scans, batch equilibrium
// solves, and Gram-matrix assembly.
//
#include <chrono>
#include <cstdio>
#include <random>

#include "bubblelab/modal.hpp"
#include "bubblelab/parallel.hpp"

namespace bl = bubblelab;

namespace {

template <class F>
double time_ms(F&& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
    std::printf("workers: %d\n", bl::worker_count());
    bl::PhysicalParams p;

    {
        const double I = 3.0 * p.R_spec * p.T_inf / (8.0 * M_PI * p.sigma);
        const double vb = 3.0 / (4.0 * M_PI);
        int sink = 0;
        const double s = time_ms(
            [&] { sink += bl::scan_sign_changes_serial(I, 1.0, vb, 2'000'000); },
            5);
        const double par = time_ms(
            [&] { sink += bl::scan_sign_changes(I, 1.0, vb, 2'000'000); }, 5);
        if (sink < 0) std::printf("unreachable\n");
        report("sign scan (2e6 pts)", s, par);
    }

    {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(0.1, 10.0);
        std::vector<std::pair<double, double>> mv(2000);
        for (auto& [M, V] : mv) {
            M = u(rng);
            V = u(rng);
        }
        const double s =
            time_ms([&] { bl::solve_batch_serial(mv, p); }, 3);
        const double par = time_ms([&] { bl::solve_batch(mv, p); }, 3);
        report("equilibrium batch (2000)", s, par);
    }

    {
        const bl::EquilibriumState eq = bl::solve_radius(1.0, 1.0, p);
        bl::ModalBasis basis(eq, 96);
        const double s = time_ms([&] { basis.gram_serial(); }, 3);
        const double par = time_ms([&] { basis.gram(); }, 3);
        report("gram matrix (N=96,Q=384)", s, par);
    }
    return 0;
}
