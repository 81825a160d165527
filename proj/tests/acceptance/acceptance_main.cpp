// Runs the acceptance criteria on the full grid; one line per criterion.
#include <iostream>

#include "nwe/acceptance.hpp"

int main() {
    nwe::AcceptanceOptions options;
    options.level = nwe::AcceptanceLevel::Full;
    const auto results = nwe::run_acceptance(options);
    nwe::print_acceptance(std::cout, results);
    const bool ok = nwe::all_passed(results);
    std::cout << (ok ? "all criteria passed" : "some criteria failed") << '\n';
    return ok ? 0 : 1;
}
