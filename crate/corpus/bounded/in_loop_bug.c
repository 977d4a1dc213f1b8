int main() {
    int i = 0;
    while (i < 10) {
        assert(i != 7);
        i++;
    }
}
