// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Usage: acceptance [--level quick|full] [id ...]

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "remlab/validation.hpp"

int main(int argc, char** argv)
{
    using namespace remlab::validation;
    Level level = Level::Full;
    std::vector<int> ids;
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--level" && i + 1 < argc) {
                level = parse_level(argv[++i]);
            } else {
                ids.push_back(std::stoi(arg));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "usage: acceptance [--level quick|full] [id ...]: " << e.what() << '\n';
        return 2;
    }

    const Report report = run(level, ids, [](const CriterionResult& r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " ("
                  << r.seconds << " s): " << r.detail << std::endl;
        for (const auto& w : r.warnings) {
            std::cout << "     warning: " << w << std::endl;
        }
    });
    int passed = 0;
    for (const auto& r : report.criteria) {
        passed += r.pass ? 1 : 0;
    }
    std::cout << passed << "/" << report.criteria.size() << " criteria passed (level "
              << to_string(level) << ", " << report.seconds << " s)" << std::endl;
    return report.all_pass() ? EXIT_SUCCESS : EXIT_FAILURE;
}
