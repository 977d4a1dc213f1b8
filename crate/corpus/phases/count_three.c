int main() {
    unsigned int i = 0;
    while (i < 3)
        i++;
    assert(i == 3);
}
