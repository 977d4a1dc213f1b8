unsigned int g;
int main() {
 unsigned int g_init = g;
 g = 7u;
 __ESBMC_assume(g_init==0);
}
