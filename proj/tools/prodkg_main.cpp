#include <iostream>

int main() {
  std::cerr << "prodkg: pipeline CLI not wired yet\n";
  return 2;
}
