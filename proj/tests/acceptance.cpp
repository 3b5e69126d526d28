// Acceptance suite: runs every verification criterion at the thresholds
// shipped in configs/check.cfg and prints one pass/fail line per criterion.

#include "fracheat/check.hpp"

#include <iostream>

#ifndef FRACHEAT_CONFIG_DIR
#define FRACHEAT_CONFIG_DIR "configs"
#endif

int main() {
    fracheat::CheckConfig cfg;
    const std::string path = std::string(FRACHEAT_CONFIG_DIR) + "/check.cfg";
    try {
        cfg = fracheat::check_config_from(fracheat::parse_config_file(path));
    } catch (const fracheat::ConfigError& e) {
        std::cerr << "falling back to built-in thresholds: " << e.what()
                  << "\n";
    }
    const int failures = fracheat::run_check(std::cout, cfg);
    if (failures > 0) {
        std::cerr << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
