#include "cli_app.hpp"

int main(int argc, char** argv) {
  return spde::cli::run({argv + 1, argv + argc});
}
