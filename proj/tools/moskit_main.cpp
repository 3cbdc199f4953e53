#include "moskit/cli.hpp"

int main(int argc, char** argv) {
    return moskit::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
