#include <iostream>

#include "feedback_kmeans/cli.hpp"

int main(int argc, char** argv) { return fbk::run_cli(argc, argv, std::cout, std::cerr); }
