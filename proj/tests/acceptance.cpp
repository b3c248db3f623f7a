// Runs every acceptance criterion and prints one pass/fail line each.
// Optional argument --only=<substring> restricts to matching criteria.

#include <cstring>
#include <iostream>
#include <string>

#include "gmacfb/verify.hpp"

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--only=", 0) == 0) only = arg.substr(7);
    }
    const auto results = gmacfb::run_acceptance(only);
    if (results.empty()) {
        std::cerr << "no criterion matches '" << only << "'\n";
        return 2;
    }
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail
                  << "]\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
