int main() { int i = 0; int j = 0;
 while (i < 5) {
 __ESBMC_assume(0<=i && i<=5 && i==j);
 i++; j++; } }
