int main() { int j = 1; int t = 1;
 __ESBMC_assume(2*j < 5*t);
 assert(j == t); }
