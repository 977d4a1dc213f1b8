int main() {
    int i = 10;
    while (i >= 0)
        i--;
    assert(i == 0);
}
