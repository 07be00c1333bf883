#include <string>
#include <vector>

#include "rtlrc/cli.hpp"

int main(int argc, char** argv) {
    return rtlrc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
