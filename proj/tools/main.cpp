#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli/cli.hpp"

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("crisisgt"));
    return crisisgt::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
