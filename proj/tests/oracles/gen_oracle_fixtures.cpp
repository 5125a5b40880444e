// Writes tests/fixtures/oracle_values.json from the independent oracles.
// Run once; the output is committed and read by the test suites.
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "oracles.hpp"

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "tests/fixtures/oracle_values.json";
    nlohmann::json j;
    j["triple_norm"]["min1_rho_minus5_alpha3"] =
        oracle::weighted_radial([](double r) { return std::min(1.0, std::pow(r, -5.0)); }, 3.0);
    j["triple_norm"]["indicator_unit_alpha2"] =
        oracle::weighted_radial([](double r) { return r <= 1.0 ? 1.0 : 0.0; }, 2.0);

    // mollified azimuthal field, eps = 1/2: inside the ball A is a rigid rotation with
    // curl (0, 0, 2 lambda / eps^2), so sup_sphere |B_tau|^2 = 4 lambda^2 / eps^4; zero outside
    const double eps = 0.5;
    auto bt3 = [eps](double lam) {
        return oracle::weighted_radial([&](double r) { return r < eps ? 4 * lam * lam / std::pow(eps, 4) : 0.0; }, 3.0);
    };
    j["certificate"]["eps"] = eps;
    j["certificate"]["bt3_at_lambda_1"] = bt3(1.0);
    j["certificate"]["flip_lambda"] = oracle::bisect([&](double lam) { return bt3(lam) <= 0.5; }, 0.0, 2.0);

    for (double d : {0.5, 0.25, 0.1, 0.05, 0.02}) {
        char key[32];
        std::snprintf(key, sizeof key, "%.2f", d);
        j["hardy_extremal"][key] = oracle::extremal_family_ratio(d);
    }
    std::ofstream(out) << j.dump(2) << '\n';
    std::cout << "wrote " << out << '\n';
}
