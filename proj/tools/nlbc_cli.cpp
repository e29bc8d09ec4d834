#include <nlbc/cli.hpp>

int main(int argc, char** argv) { return nlbc::cli::run(argc, argv); }
