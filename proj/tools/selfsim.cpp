#include <iostream>
#include <string>
#include <vector>

#include "selfsim/app.hpp"

int main(int argc, char** argv) {
  using namespace selfsim;
  try {
    const RunConfig cfg = parse_config(std::vector<std::string>(argv + 1, argv + argc));
    const RunResult result = run(cfg);
    std::cout << result.report.dump(2) << '\n';
    return result.exit_code;
  } catch (const HelpRequested& help) {
    std::cout << help.what();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "selfsim: error: " << e.what() << '\n';
    return kExitInputError;
  }
}
