#include <cstdio>
int main() {
  std::puts("acceptance: not implemented yet");
  return 1;
}
