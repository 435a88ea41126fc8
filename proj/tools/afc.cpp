#include "afc/cli/app.hpp"

int main(int argc, char** argv) { return afc::cli::run(argc, argv); }
