int main() {
    int n = 0;
    int i;
    for (i = 1; i <= 8; i++)
        n++;
    assert(n == 8);
}
