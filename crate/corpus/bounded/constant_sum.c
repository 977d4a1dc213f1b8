int main() {
    unsigned int a = 0;
    unsigned int b = 500;
    while (a < 500) {
        a++;
        b--;
    }
    assert(b == 0);
}
