#include <cstdio>
int main() { std::puts("dbarh: experiment runner (wired up later)"); return 0; }
