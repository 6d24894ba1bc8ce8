#include <string>
#include <vector>

#include "roves/pipeline.hpp"

int main(int argc, char** argv) {
  return roves::pipeline::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
