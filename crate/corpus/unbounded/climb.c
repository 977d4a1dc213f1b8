int main() {
    unsigned int x = *;
    unsigned int seen = 0;
    while (x < 100) {
        x++;
        seen = 1;
    }
    assert(x >= 100);
}
