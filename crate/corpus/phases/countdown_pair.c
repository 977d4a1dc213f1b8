int main() {
    unsigned int x = *;
    unsigned int y = x;
    while (x > 0) {
        x--;
        y--;
    }
    assert(y == 0);
}
