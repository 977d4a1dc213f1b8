int count(int x) {
    int w = 0;
    while (x > 10) {
        // P(w,x) {w==0, x#init>10}
        x--;
    }
    return w;
}
int main() { int r = count(15); }
