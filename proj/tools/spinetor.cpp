// Temporary during bring-up; the full CLI lands with the digger.
#include <cstdio>
int main() { std::puts("spinetor: under construction"); return 2; }
