int main() {
    unsigned int x = *;
    while (x > 0)
        x--;
    assert(x != 0);
}
