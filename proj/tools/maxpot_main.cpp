#include <string>
#include <vector>

#include "maxpot/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return maxpot::dispatch(args);
}
