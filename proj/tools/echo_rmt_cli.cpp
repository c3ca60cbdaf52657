#include "echo_rmt/cli.hpp"

int main(int argc, char** argv)
{
    return echo_rmt::cli::run_cli(argc, argv);
}
