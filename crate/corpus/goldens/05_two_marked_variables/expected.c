void f(unsigned int a, int b) {
 unsigned int a_init = a;
 int b_init = b;
 __ESBMC_assume(a_init<=b && b_init>=0);
 a = a + 1u;
}
int main() { f(1u, 2); }
