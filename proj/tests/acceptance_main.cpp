#include <iostream>
#include <string>

#include "illposed/acceptance.hpp"

int main(int argc, char** argv) {
    const std::string cli_path = argc > 1 ? argv[1] : "";
    const auto results = illposed::acceptance::run_all(cli_path, std::cout);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    return ok ? 0 : 4;
}
