// Integrates the classical system from near the origin and writes the
// trajectory as CSV (t,x,y,z) to stdout.

#include <iostream>
#include <limits>

#include "lyapdim/lyapdim.hpp"

int main() {
    using namespace lyapdim;
    const SystemParams p = SystemParams::classical();
    const IntegratorConfig cfg{};
    std::cout.precision(std::numeric_limits<double>::max_digits10);
    std::cout << "t,x,y,z\n";
    long step = 0;
    integrate(p, {1e-3, 0.0, 0.0}, 50.0, cfg, [&](double t, const StateVec& s) {
        if (step++ % 10 == 0) std::cout << t << ',' << s.x << ',' << s.y << ',' << s.z << '\n';
    });
}
