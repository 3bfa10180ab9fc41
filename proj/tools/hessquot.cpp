#include <string>
#include <vector>

#include "hessquot/app.hpp"

int main(int argc, char** argv) {
    return hessquot::app::run(std::vector<std::string>(argv + 1, argv + argc));
}
