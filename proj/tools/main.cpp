#include <cstdio>

int main() {
  std::puts("veflow: CLI not wired up yet");
  return 0;
}
