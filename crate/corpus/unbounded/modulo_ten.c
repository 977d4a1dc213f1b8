int main() {
    unsigned int x = *;
    while (x >= 10)
        x -= 10;
    assert(x < 10);
}
