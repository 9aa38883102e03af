// Prints an ASCII map of the theorem's verdict over (sigma, b) at r = 28.
//   F  formula holds    E  converges to equilibria    .  conditions fail

#include <iostream>

#include "lyapdim/lyapdim.hpp"

int main() {
    using namespace lyapdim;
    ScanRequest req;
    req.fixed = Param::R;
    req.fixed_value = 28.0;
    req.axis1 = {Param::B, 0.0, 8.0, 24};
    req.axis2 = {Param::Sigma, 0.0, 20.0, 60};
    const auto cells = run_scan(req, threads_from_env(2));
    std::cout << "r = 28; rows b from 8 down to 0, columns sigma from 0 to 20\n";
    for (int i = req.axis1.cells - 1; i >= 0; --i) {
        for (int j = 0; j < req.axis2.cells; ++j) {
            const Outcome o = cells[i * req.axis2.cells + j].verdict;
            std::cout << (o == Outcome::FormulaHolds ? 'F' : o == Outcome::ConvergesToEquilibria ? 'E' : '.');
        }
        std::cout << '\n';
    }
}
