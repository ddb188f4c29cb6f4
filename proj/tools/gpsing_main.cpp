#include <cstdio>
#include <string>
#include <vector>

#include "gpsing/errors.hpp"
#include "gpsing/report.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const gpsing::RunConfig cfg = gpsing::parse_config(args);
    return gpsing::run_command(cfg);
  } catch (const gpsing::RegimeViolation& e) {
    std::fprintf(stderr, "gpsing: %s\n", e.what());
    return 2;
  } catch (const gpsing::UsageError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const gpsing::Error& e) {
    std::fprintf(stderr, "gpsing: %s\n", e.what());
    return 3;
  }
}
