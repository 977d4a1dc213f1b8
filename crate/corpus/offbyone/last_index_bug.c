int main() {
    int last = 0;
    int i;
    for (i = 0; i <= 8; i++)
        last = i;
    assert(last < 8);
}
