int count(int x) {
    int x_init = x;
    int w = 0;
    while (x > 10) {
        __ESBMC_assume(w==0 && x_init>10);
        x--;
    }
    return w;
}
int main() { int r = count(15); }
