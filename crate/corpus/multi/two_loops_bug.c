int main() {
    int x = 0;
    int y;
    while (x < 5)
        x++;
    y = x;
    while (y > 0)
        y--;
    assert(x == 4);
}
