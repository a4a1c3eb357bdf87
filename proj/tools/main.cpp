#include "runner.hpp"

int main(int argc, char** argv)
{
    return crq::runner::cli_main(argc, argv);
}
