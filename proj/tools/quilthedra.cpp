#include <quilthedra/cli.hpp>

int main(int argc, char** argv) { return quilthedra::cli::run(argc, argv); }
