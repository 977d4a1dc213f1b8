int main() {
    int x = *;
    while (x > 0)
        x -= 2;
    assert(x == 0);
}
