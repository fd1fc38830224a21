// Reconstruct the sound-soft disk of radius 0.5 from noisy near-field data
// with the far-field-transform functional, using the library directly.
#include <cstdio>

#include "softscat/softscat.hpp"

int main() {
    using namespace softscat;
    const double k = 4.0;
    const auto shape = make_shape("circle");
    const auto gamma = make_source_curve(5.0, 64);

    const auto sol = solve_forward(shape, gamma, k);
    const auto data = add_noise(evaluate_nearfield(sol, gamma), 0.05, 1);
    std::printf("forward residual %.2e, rank %d\n", sol.residual, sol.rank);

    const auto F = far_field_transform(assemble_N(data), assemble_Q(5.0, k, 64, 10), assemble_R(64, 10));
    GridSpec grid;
    grid.nx = grid.ny = 41;
    const auto img = evaluate_grid(Functional::FF, [&](const Point2& z) { return w_ff(F, z, k, 4.0); }, grid);

    // coarse ASCII view, top row = largest y
    const char* ramp = " .:-=+*#%@";
    for (int j = img.ny() - 1; j >= 0; j -= 2) {
        for (int i = 0; i < img.nx(); ++i) std::putchar(ramp[static_cast<int>(img.at(i, j) * 9.0 + 0.5)]);
        std::putchar('\n');
    }
    const Point2 peak = img.node(img.argmax());
    std::printf("peak at (%.2f, %.2f), distance to the disk %.3f\n", peak.x(), peak.y(), distance_to_obstacle(shape, peak));
}
