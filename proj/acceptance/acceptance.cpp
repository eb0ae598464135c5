// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <iostream>
#include <thread>

#include "tiling/verify.hpp"

int main(int argc, char** argv) {
  tiling::verify::VerifyOptions opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  opt.log = [](const std::string& s) { std::cerr << s << std::endl; };
  const std::string suite = argc > 1 ? argv[1] : "all";
  bool ok = true;
  tiling::verify::run_suite(suite, opt, [&](const tiling::verify::CriterionResult& r) {
    std::cout << tiling::verify::format_line(r) << std::endl;
    ok = ok && r.pass && !r.skipped;
  });
  return ok ? 0 : 1;
}
