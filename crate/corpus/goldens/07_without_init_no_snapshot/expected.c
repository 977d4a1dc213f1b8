int main() { int x = 3;
 __ESBMC_assume(x==3);
 assert(x == 3); }
