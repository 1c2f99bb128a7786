#include <iostream>

#include "delaygeom/cli.hpp"

int main(int argc, char** argv)
{
    return delaygeom::main_entry(argc, argv, std::cout, std::cerr);
}
