int main() {
    unsigned int s = 0;
    int i;
    for (i = 0; i < 150; i++) {
        if (s < 10)
            s++;
    }
    assert(s <= 10);
}
