int main() {
    unsigned int x = *;
    unsigned int c = 0;
    while (x > 0) {
        x--;
        c++;
    }
    assert(c != 2);
}
