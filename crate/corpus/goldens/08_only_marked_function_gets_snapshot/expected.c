void g(int y) {
 __ESBMC_assume(y>=0);
}
void h(int z) {
 int z_init = z;
 __ESBMC_assume(z_init==z);
}
int main() { g(1); h(2); }
