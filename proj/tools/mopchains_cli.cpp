/**
 * @file mopchains_cli.cpp
 * @brief Entry point of the mopchains command-line tool.
 */

#include "mopchains/cli.hpp"

int main(int argc, char** argv) { return mopchains::cli::run(argc, argv); }
