int main() { unsigned int x = 1u; unsigned int y = 2u;
 __ESBMC_assume(x <= 0x10 && y < 10u && 3*x <= 2*y);
 }
