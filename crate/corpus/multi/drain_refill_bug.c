int main() {
    unsigned int x = *;
    unsigned int y = *;
    while (x > 0)
        x--;
    while (x < y)
        x++;
    assert(x != 6);
}
