// placeholder until the suite lands
#include <cstdio>
int main(){ std::puts("acceptance: not yet implemented"); return 1; }
