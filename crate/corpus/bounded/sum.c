int main() {
    int s = 0;
    int i;
    for (i = 0; i < 10; i++)
        s = s + i;
    assert(s == 45);
}
