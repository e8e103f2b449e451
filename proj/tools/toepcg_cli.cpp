#include "toepcg/experiment.hpp"

int main(int argc, char** argv) { return toepcg::cli_main(argc, argv); }
