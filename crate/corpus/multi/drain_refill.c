int main() {
    unsigned int x = *;
    while (x > 0)
        x--;
    while (x < 3)
        x++;
    assert(x == 3);
}
