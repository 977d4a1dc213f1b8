int main() {
    unsigned int i = 0;
    do {
        i++;
    } while (i < 5);
    assert(i == 5);
}
