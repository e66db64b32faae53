#include <bbeta/cli.hpp>

int main(int argc, char** argv) { return bbeta::cli_dispatch(argc, argv); }
