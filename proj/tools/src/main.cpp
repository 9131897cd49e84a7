#include "wipet_cli/app.hpp"

int main(int argc, char** argv) { return wipet::cli::run(argc, argv); }
