void f(int x) {
 int x_init = x;
 __ESBMC_assume(x_init>=x);
 x--;
 __ESBMC_assume(x_init>x);
}
int main() { f(4); }
