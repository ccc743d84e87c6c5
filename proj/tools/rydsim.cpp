#include "rydsim/app/runner.hpp"

int main(int argc, char** argv) { return rydsim::app::run_main(argc, argv); }
