// Compares the closed-form dimension bound with numerical Lyapunov
// dimensions on the classical attractor and at the origin.

#include <cstdio>

#include "lyapdim/lyapdim.hpp"

int main() {
    using namespace lyapdim;
    const SystemParams p = SystemParams::classical();
    const IntegratorConfig cfg{};

    const TheoremVerdict v = check_conditions(p);
    std::printf("verdict: %s, closed-form bound %.6f\n", std::string(to_string(v.outcome)).c_str(),
                leonov_formula(p));

    const LeSpectrum le = le_spectrum_qr(p, {1, 1, 1}, 1000.0, 100.0, cfg);
    std::printf("spectrum on the attractor: %.4f %.4f %.4f (sum %.6f, trace %.6f)\n", le.exponents[0],
                le.exponents[1], le.exponents[2], le.sum(), p.trace());
    std::printf("Kaplan-Yorke dimension on the attractor: %.4f\n", kaplan_yorke(le).value);

    const LocalDimension origin = local_dimension(p, {0, 0, 0}, 1000.0, 100.0, cfg);
    std::printf("local dimension at the origin: %.6f\n", origin.final.value);

    const auto cert = find_gamma_certificate(p);
    if (cert) {
        const RCheckReport rep = verify_R_nonpositive(p, *cert, 20000);
        std::printf("certificate gammas (%.6g, %.6g, %.6g, %.6g), max R %.3f, %s\n", cert->gamma1, cert->gamma2,
                    cert->gamma3, cert->gamma4, rep.max_r, rep.passed() ? "verified" : "rejected");
    }
}
