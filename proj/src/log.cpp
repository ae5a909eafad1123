#include "drpo/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>

namespace drpo::log {

int level() {
  static const int lvl = [] {
    const char* env = std::getenv("DRPO_LOG");
    if (env == nullptr) return 0;
    return std::atoi(env);
  }();
  return lvl;
}

static void vemit(const char* tag, const char* fmt, va_list args) {
  std::fprintf(stderr, "[drpo/%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

void info(const char* fmt, ...) {
  if (level() < 1) return;
  va_list args;
  va_start(args, fmt);
  vemit("info", fmt, args);
  va_end(args);
}

void debug(const char* fmt, ...) {
  if (level() < 2) return;
  va_list args;
  va_start(args, fmt);
  vemit("debug", fmt, args);
  va_end(args);
}

}  // namespace drpo::log
