#include "kdecf/cli.hpp"

int main(int argc, char** argv)
{
    return kdecf::cli::run(argc, argv);
}
