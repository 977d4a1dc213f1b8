int main() {
    unsigned int i = 0;
    while (i < 50) {
        assert(i < 50);
        i++;
    }
}
